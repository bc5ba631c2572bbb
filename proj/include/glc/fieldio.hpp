#pragma once

#include <string>

#include "glc/grid.hpp"

namespace glc {

/// Flat binary field snapshot.
/// Header: magic "GLCF", u32 version, u32 dim, u32 nx, u32 ny, u32 nt,
///         f64 dx, dy, dt, f64 lo[2], hi[2], f64 horizon.
/// Payload: time-major, row-major interleaved (re, im) doubles.
void write_field_binary(const Trajectory& z, const std::string& path);

/// Reads a snapshot; if `domain` is given it must match the stored geometry.
/// Otherwise a minimal DomainSpec is synthesized (omega = Omega, omega0 a
/// centered half box) since the control boxes are not part of a field file.
Trajectory read_field_binary(const std::string& path, const DomainSpec* domain = nullptr);

/// CSV dump (t, x[, y], re, im) for small grids.
void write_field_csv(const Trajectory& z, const std::string& path);

}  // namespace glc
