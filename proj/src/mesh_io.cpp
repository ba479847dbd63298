#include "hho/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace hho {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<Line> content_lines(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        auto tokens = split(text.substr(pos, end - pos));
        if (!tokens.empty() && tokens.front().front() != '#')
            lines.push_back({number, std::move(tokens)});
        pos = end + 1;
    }
    return lines;
}

double parse_double(const Line& line, std::string_view tok)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw MeshParseError(line.number, "invalid number '" + std::string(tok) + "'");
    return v;
}

std::size_t parse_index(const Line& line, std::string_view tok)
{
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw MeshParseError(line.number, "invalid integer '" + std::string(tok) + "'");
    return v;
}

std::size_t parse_header(const Line& line, std::string_view keyword)
{
    if (line.tokens.size() != 2 || line.tokens[0] != keyword)
        throw MeshParseError(line.number, "expected '" + std::string(keyword) + " <count>'");
    return parse_index(line, line.tokens[1]);
}

}  // namespace

Mesh read_mesh(std::string_view text)
{
    const auto lines = content_lines(text);
    std::size_t cur = 0;
    auto next = [&](const char* what) -> const Line& {
        if (cur >= lines.size()) {
            const std::size_t last = lines.empty() ? 1 : lines.back().number;
            throw MeshParseError(last, std::string("unexpected end of input, expected ") + what);
        }
        return lines[cur++];
    };

    const Line& magic = next("header");
    if (magic.tokens.size() != 2 || magic.tokens[0] != "poly-mesh" || magic.tokens[1] != "1")
        throw MeshParseError(magic.number, "expected 'poly-mesh 1'");

    const std::size_t nv = parse_header(next("vertices header"), "vertices");
    std::vector<Point> vertices;
    vertices.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const Line& l = next("vertex");
        if (l.tokens.size() != 2) throw MeshParseError(l.number, "expected '<x> <y>'");
        vertices.emplace_back(parse_double(l, l.tokens[0]), parse_double(l, l.tokens[1]));
    }

    const std::size_t nc = parse_header(next("cells header"), "cells");
    std::vector<std::vector<std::size_t>> loops;
    loops.reserve(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const Line& l = next("cell");
        const std::size_t n = parse_index(l, l.tokens.front());
        if (l.tokens.size() != n + 1)
            throw MeshParseError(l.number, "cell declares " + std::to_string(n) + " vertices but lists "
                                               + std::to_string(l.tokens.size() - 1));
        std::vector<std::size_t> loop;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t id = parse_index(l, l.tokens[j]);
            if (id >= nv) throw MeshParseError(l.number, "unknown vertex id " + std::to_string(id));
            loop.push_back(id);
        }
        loops.push_back(std::move(loop));
    }
    if (cur != lines.size()) throw MeshParseError(lines[cur].number, "trailing data after cells");

    return Mesh(std::move(vertices), std::move(loops));
}

std::string write_mesh(const Mesh& mesh)
{
    std::string out = "poly-mesh 1\nvertices " + std::to_string(mesh.n_vertices()) + "\n";
    char buf[64];
    for (const auto& p : mesh.vertices()) {
        for (int d = 0; d < 2; ++d) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p[d], std::chars_format::general, 17);
            out.append(buf, ptr);
            out.push_back(d == 0 ? ' ' : '\n');
        }
    }
    out += "cells " + std::to_string(mesh.n_cells()) + "\n";
    for (const auto& c : mesh.cells()) {
        out += std::to_string(c.vertices.size());
        for (std::size_t v : c.vertices) out += " " + std::to_string(v);
        out += "\n";
    }
    return out;
}

Mesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_mesh(ss.str());
}

void write_mesh_file(const Mesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file '" + path + "'");
    out << write_mesh(mesh);
}

}  // namespace hho
