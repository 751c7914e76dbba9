#include "tev/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tev/errors.hpp"

namespace tev {

namespace {

std::array<int, 2> norm_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double signed_area(const Mesh& m, const std::array<int, 3>& t) {
    const auto& a = m.vertices[t[0]];
    const auto& b = m.vertices[t[1]];
    const auto& c = m.vertices[t[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

std::map<std::array<int, 2>, int> edge_incidence(const Mesh& m) {
    std::map<std::array<int, 2>, int> count;
    for (const auto& t : m.triangles) {
        ++count[norm_edge(t[0], t[1])];
        ++count[norm_edge(t[1], t[2])];
        ++count[norm_edge(t[2], t[0])];
    }
    return count;
}

// Fills boundary_edges (if empty) and the node partition from triangle
// incidence, then validates.
void finalize(Mesh& m) {
    const auto incidence = edge_incidence(m);
    std::vector<std::array<int, 2>> derived;
    for (const auto& [e, c] : incidence) {
        if (c == 1) derived.push_back(e);
        if (c > 2)
            throw ValidationError("mesh: non-manifold edge (" + std::to_string(e[0]) + "," +
                                  std::to_string(e[1]) + ") with " + std::to_string(c) +
                                  " incident triangles");
    }
    if (m.boundary_edges.empty()) {
        m.boundary_edges = derived;
    } else {
        auto listed = m.boundary_edges;
        for (auto& e : listed) e = norm_edge(e[0], e[1]);
        std::sort(listed.begin(), listed.end());
        if (listed != derived)
            throw ValidationError("mesh: boundary_edges disagree with triangle incidence");
    }
    std::set<int> bset;
    for (const auto& e : m.boundary_edges) {
        bset.insert(e[0]);
        bset.insert(e[1]);
    }
    m.boundary_nodes.assign(bset.begin(), bset.end());
    m.interior_nodes.clear();
    for (int i = 0; i < m.num_vertices(); ++i)
        if (!bset.count(i)) m.interior_nodes.push_back(i);
    m.validate();
}

}  // namespace

int Mesh::num_edges() const {
    std::set<std::array<int, 2>> edges;
    for (const auto& t : triangles) {
        edges.insert(norm_edge(t[0], t[1]));
        edges.insert(norm_edge(t[1], t[2]));
        edges.insert(norm_edge(t[2], t[0]));
    }
    return static_cast<int>(edges.size());
}

double Mesh::total_area() const {
    double area = 0.0;
    for (const auto& t : triangles) area += signed_area(*this, t);
    return area;
}

double Mesh::boundary_length() const {
    double len = 0.0;
    for (const auto& e : boundary_edges) len += (vertices[e[0]] - vertices[e[1]]).norm();
    return len;
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& t : triangles)
        for (int i = 0; i < 3; ++i)
            h = std::max(h, (vertices[t[i]] - vertices[t[(i + 1) % 3]]).norm());
    return h;
}

void Mesh::validate() const {
    for (const auto& t : triangles) {
        for (int v : t)
            if (v < 0 || v >= num_vertices())
                throw ValidationError("mesh: triangle vertex index out of range");
        if (signed_area(*this, t) <= 1e-16)
            throw ValidationError("mesh: nonpositive-area triangle (" + std::to_string(t[0]) +
                                  "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")");
    }
    for (const auto& e : boundary_edges)
        if (e[0] < 0 || e[0] >= num_vertices() || e[1] < 0 || e[1] >= num_vertices())
            throw ValidationError("mesh: boundary edge index out of range");
    if (static_cast<int>(interior_nodes.size() + boundary_nodes.size()) != num_vertices())
        throw ValidationError("mesh: node partition does not cover all vertices");
}

namespace {

Mesh square_grid(int cells, bool lshape) {
    const int N = cells;
    const double h = 1.0 / N;
    Mesh m;
    auto vid = [N](int i, int j) { return j * (N + 1) + i; };
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i)
            m.vertices.emplace_back(-0.5 + i * h, -0.5 + j * h);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            if (lshape) {
                const double cx = -0.5 + (i + 0.5) * h;
                const double cy = -0.5 + (j + 0.5) * h;
                if (cx > 0.0 && cy > 0.0) continue;  // the removed quadrant [0,1/2]^2
            }
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                m.triangles.push_back({v00, v10, v11});
                m.triangles.push_back({v00, v11, v01});
            } else {
                m.triangles.push_back({v00, v10, v01});
                m.triangles.push_back({v10, v11, v01});
            }
        }
    }
    if (lshape) {
        // drop the vertices interior to the removed quadrant and re-index
        std::set<int> used;
        for (const auto& t : m.triangles) used.insert(t.begin(), t.end());
        std::vector<int> remap(m.vertices.size(), -1);
        std::vector<Eigen::Vector2d> kept;
        for (int v = 0; v < m.num_vertices(); ++v) {
            if (used.count(v)) {
                remap[v] = static_cast<int>(kept.size());
                kept.push_back(m.vertices[v]);
            }
        }
        m.vertices = std::move(kept);
        for (auto& t : m.triangles)
            for (int& v : t) v = remap[v];
    }
    finalize(m);
    return m;
}

Mesh disk_fan() {
    Mesh m;
    const int nb = 16;
    m.geometry = Mesh::BoundaryGeometry::UnitCircle;
    m.vertices.emplace_back(0.0, 0.0);
    for (int i = 0; i < nb; ++i) {
        const double t = 2.0 * M_PI * i / nb;
        m.vertices.emplace_back(std::cos(t), std::sin(t));
    }
    for (int i = 0; i < nb; ++i) m.triangles.push_back({0, 1 + i, 1 + (i + 1) % nb});
    finalize(m);
    return m;
}

}  // namespace

Mesh generate(const DomainSpec& domain) {
    if (domain.refinement < 0) throw ConfigError("mesh: refinement level must be >= 0");
    switch (domain.kind) {
        case DomainSpec::Kind::UnitSquare:
            return square_grid(4 << domain.refinement, false);
        case DomainSpec::Kind::LShape:
            return square_grid(4 << domain.refinement, true);
        case DomainSpec::Kind::UnitDisk: {
            Mesh m = disk_fan();
            for (int r = 0; r < domain.refinement; ++r) m = refine(m);
            return m;
        }
        case DomainSpec::Kind::ExternalMesh: {
            Mesh m = load_mesh(domain.path);
            for (int r = 0; r < domain.refinement; ++r) m = refine(m);
            return m;
        }
    }
    throw ConfigError("mesh: unknown domain kind");
}

Mesh refine(const Mesh& mesh) {
    Mesh out;
    out.geometry = mesh.geometry;
    out.vertices = mesh.vertices;

    std::set<std::array<int, 2>> boundary;
    for (const auto& e : mesh.boundary_edges) boundary.insert(norm_edge(e[0], e[1]));

    std::map<std::array<int, 2>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto e = norm_edge(a, b);
        auto it = midpoint.find(e);
        if (it != midpoint.end()) return it->second;
        Eigen::Vector2d p = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        if (mesh.geometry == Mesh::BoundaryGeometry::UnitCircle && boundary.count(e))
            p.normalize();
        const int id = out.num_vertices();
        out.vertices.push_back(p);
        midpoint.emplace(e, id);
        return id;
    };

    for (const auto& t : mesh.triangles) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    finalize(out);
    return out;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("mesh: cannot open '" + path + "' for writing");
    os << "tevmesh 1\n";
    os << "vertices " << mesh.num_vertices() << "\n";
    char buf[80];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
        os << buf;
    }
    os << "triangles " << mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
    os << "boundary_edges " << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges) os << e[0] << ' ' << e[1] << "\n";
    if (!os) throw IoError("mesh: write to '" + path + "' failed");
}

namespace {

// Reads lines, skipping '#' comments; tracks the 1-based line number.
struct LineReader {
    std::ifstream is;
    int line_no = 0;

    explicit LineReader(const std::string& path) : is(path, std::ios::binary) {}

    std::string next(const char* what) {
        std::string line;
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return line;
        }
        throw ParseError(std::string("mesh: unexpected end of file, expected ") + what, line_no);
    }
};

}  // namespace

Mesh load_mesh(const std::string& path) {
    LineReader r(path);
    if (!r.is) throw IoError("mesh: cannot open '" + path + "'");

    if (r.next("header") != "tevmesh 1")
        throw ParseError("mesh: bad header, expected 'tevmesh 1'", r.line_no);

    auto read_count = [&r](const char* keyword) {
        std::istringstream ss(r.next(keyword));
        std::string word;
        long count = -1;
        ss >> word >> count;
        if (word != keyword || count < 0 || !ss)
            throw ParseError(std::string("mesh: expected '") + keyword + " N'", r.line_no);
        return count;
    };

    Mesh m;
    const long nv = read_count("vertices");
    m.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ss(r.next("vertex line"));
        double x, y;
        if (!(ss >> x >> y)) throw ParseError("mesh: bad vertex line", r.line_no);
        m.vertices.emplace_back(x, y);
    }
    const long nt = read_count("triangles");
    m.triangles.reserve(nt);
    for (long i = 0; i < nt; ++i) {
        std::istringstream ss(r.next("triangle line"));
        int a, b, c;
        if (!(ss >> a >> b >> c)) throw ParseError("mesh: bad triangle line", r.line_no);
        m.triangles.push_back({a, b, c});
    }
    const long nb = read_count("boundary_edges");
    m.boundary_edges.reserve(nb);
    for (long i = 0; i < nb; ++i) {
        std::istringstream ss(r.next("boundary edge line"));
        int a, b;
        if (!(ss >> a >> b)) throw ParseError("mesh: bad boundary edge line", r.line_no);
        m.boundary_edges.push_back({a, b});
    }
    finalize(m);
    return m;
}

}  // namespace tev
