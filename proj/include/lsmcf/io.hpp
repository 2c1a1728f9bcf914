#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lsmcf/grid.hpp"
#include "lsmcf/measures.hpp"

namespace lsmcf::io {

// Grid dump layout (all little endian):
//   "LSMC" | u32 version (1) | u32 dim | u32 shape[dim] | f64 origin[dim] | f64 h |
//   f64 values[prod(shape)], axis 0 fastest.
void write_field(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);

// One byte (0 or 1) per node, same order as the values.
void write_mask(const std::vector<std::uint8_t>& mask, const std::filesystem::path& path);
std::vector<std::uint8_t> read_mask(const std::filesystem::path& path, std::size_t expected);

// Legacy VTK ASCII polydata: LINES in 2D, POLYGONS (triangles) in 3D.
void write_vtk(const FrontMesh& mesh, const std::filesystem::path& path);

// vertices.csv: id,x,y,z   edges.csv: a,b (polyline segments, or each
// undirected triangle edge once, ordered by (min, max)).
void write_mesh_csv(const FrontMesh& mesh, const std::filesystem::path& vertices,
                    const std::filesystem::path& edges);

// Shortest decimal text that reads back to the same double.
std::string fmt(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace lsmcf::io
