// Line-oriented text format for polygonal meshes:
//
//   poly-mesh 1
//   vertices <count>
//   <x> <y>                         (one line per vertex)
//   cells <count>
//   <n> <id_1> ... <id_n>           (0-based, counter-clockwise)
//
// Lines starting with '#' are comments and may appear anywhere. Blank lines
// are ignored; any other content after the last cell is an error.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "hho/mesh.hpp"

namespace hho {

class MeshParseError : public std::runtime_error {
public:
    MeshParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

Mesh read_mesh(std::string_view text);
std::string write_mesh(const Mesh& mesh);

Mesh read_mesh_file(const std::string& path);
void write_mesh_file(const Mesh& mesh, const std::string& path);

}  // namespace hho
