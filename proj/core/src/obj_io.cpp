#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "biharm/error.hpp"
#include "biharm/mesh.hpp"

namespace biharm {

namespace {

// "12", "12/4", "12/4/7" and "12//7" all name vertex 12.
Index parse_vertex_ref(const std::string& token, std::size_t line_no)
{
    const auto slash = token.find('/');
    const std::string head = token.substr(0, slash);
    try {
        std::size_t used = 0;
        const long value = std::stol(head, &used);
        if (used != head.size() || value < 1) {
            throw std::invalid_argument(head);
        }
        return static_cast<Index>(value - 1);
    } catch (const std::exception&) {
        raise(ErrorCode::kIo, fmt::format("line {}: bad face index '{}'", line_no, token));
    }
}

} // namespace

TriMesh read_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::kIo, fmt::format("cannot open mesh file '{}'", path.string()));
    }

    std::vector<Point3> vertices;
    std::vector<Face> faces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream record(line);
        std::string tag;
        if (!(record >> tag)) {
            continue;
        }
        if (tag == "v") {
            Point3 p;
            if (!(record >> p.x() >> p.y() >> p.z())) {
                raise(ErrorCode::kIo, fmt::format("{}:{}: malformed vertex", path.string(), line_no));
            }
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<Index> refs;
            std::string token;
            while (record >> token) {
                refs.push_back(parse_vertex_ref(token, line_no));
            }
            if (refs.size() != 3) {
                raise(ErrorCode::kIo,
                      fmt::format("{}:{}: only triangles are supported (got {} vertices)", path.string(), line_no,
                                  refs.size()));
            }
            faces.push_back({refs[0], refs[1], refs[2]});
        }
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

void write_obj(const TriMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        raise(ErrorCode::kIo, fmt::format("cannot write mesh file '{}'", path.string()));
    }
    for (const auto& p : mesh.vertices()) {
        out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
    }
    for (const auto& f : mesh.faces()) {
        out << fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    }
}

} // namespace biharm
