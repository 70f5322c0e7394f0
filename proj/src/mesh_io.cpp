#include "dfn/mesh_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dfn {

namespace {

struct LineReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit LineReader(const std::string& p) : in(p), path(p) {
    if (!in) throw std::runtime_error("cannot open " + p);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  }

  std::istringstream next(const std::string& what) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return std::istringstream(line);
    }
    ++line_no;
    fail("unexpected end of file, expected " + what);
  }

  int block_count(const std::string& keyword) {
    auto ls = next(keyword + " header");
    std::string kw;
    int n = -1;
    if (!(ls >> kw >> n) || kw != keyword || n < 0)
      fail("expected '" + keyword + " <count>'");
    return n;
  }
};

/// Orders a 2D cell's nodes into a cycle by walking its edges.
std::vector<int> polygon_cycle(const Mesh& mesh, int k) {
  const auto& faces = mesh.cell_faces[k];
  std::map<int, std::vector<int>> next;  // node -> neighbors along cell edges
  for (int f : faces) {
    next[mesh.face_nodes[f][0]].push_back(mesh.face_nodes[f][1]);
    next[mesh.face_nodes[f][1]].push_back(mesh.face_nodes[f][0]);
  }
  std::vector<int> cycle;
  int prev = -1, cur = next.begin()->first;
  for (size_t i = 0; i < faces.size(); ++i) {
    cycle.push_back(cur);
    const auto& nb = next[cur];
    if (nb.size() != 2) throw std::runtime_error("cell edges do not form a cycle");
    const int nxt = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = nxt;
  }
  if (cur != cycle.front()) throw std::runtime_error("cell edges do not close a cycle");
  return cycle;
}

void put_point(std::ostream& out, const Vec3& x) {
  out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
}

}  // namespace

Mesh read_mesh(const std::string& path) {
  LineReader r(path);
  Mesh mesh;

  {
    auto ls = r.next("header");
    std::string kw;
    if (!(ls >> kw >> mesh.dim) || kw != "dfnmesh" || (mesh.dim != 2 && mesh.dim != 3))
      r.fail("expected 'dfnmesh 2' or 'dfnmesh 3'");
  }

  const int nn = r.block_count("nodes");
  mesh.nodes.assign(nn, Vec3{0, 0, 0});
  for (int s = 0; s < nn; ++s) {
    auto ls = r.next("node coordinates");
    for (int a = 0; a < mesh.dim; ++a)
      if (!(ls >> mesh.nodes[s][a])) r.fail("expected " + std::to_string(mesh.dim) + " coordinates");
  }

  auto read_index_lists = [&](int n, const std::string& what) {
    std::vector<std::vector<int>> lists(n);
    for (int i = 0; i < n; ++i) {
      auto ls = r.next(what);
      int cnt = 0;
      if (!(ls >> cnt) || cnt < mesh.dim) r.fail("bad " + what + " node count");
      lists[i].resize(cnt);
      for (int& s : lists[i]) {
        if (!(ls >> s)) r.fail("truncated " + what + " node list");
        if (s < 0 || s >= nn) r.fail(what + " references missing node " + std::to_string(s));
      }
    }
    return lists;
  };

  mesh.cell_nodes = read_index_lists(r.block_count("cells"), "cell");
  mesh.face_nodes = read_index_lists(r.block_count("faces"), "face");
  for (const auto& fn : mesh.face_nodes)
    if (mesh.dim == 2 && fn.size() != 2) r.fail("2D faces are edges with two nodes");

  mesh.fracture_id_of_face.assign(mesh.n_faces(), -1);
  const int nfr = r.block_count("fracture_faces");
  for (int i = 0; i < nfr; ++i) {
    auto ls = r.next("fracture face entry");
    int f = -1, id = -1;
    if (!(ls >> f >> id) || f < 0 || f >= mesh.n_faces() || id < 0)
      r.fail("expected '<face index> <fracture id>'");
    mesh.fracture_id_of_face[f] = id;
  }

  const int nb = r.block_count("boundary_nodes");
  std::vector<int> declared_boundary(nb);
  for (int i = 0; i < nb; ++i) {
    auto ls = r.next("boundary node index");
    if (!(ls >> declared_boundary[i]) || declared_boundary[i] < 0 || declared_boundary[i] >= nn)
      r.fail("bad boundary node index");
  }
  std::sort(declared_boundary.begin(), declared_boundary.end());

  // Recover cell-face incidence: a face bounds the cells containing all its
  // nodes. Conformity makes this exact (one or two cells per face).
  std::vector<std::vector<int>> cells_of_node(nn);
  for (int k = 0; k < mesh.n_cells(); ++k)
    for (int s : mesh.cell_nodes[k]) cells_of_node[s].push_back(k);
  mesh.cell_faces.assign(mesh.n_cells(), {});
  for (int f = 0; f < mesh.n_faces(); ++f) {
    for (int k : cells_of_node[mesh.face_nodes[f][0]]) {
      const auto& cn = mesh.cell_nodes[k];
      bool all = true;
      for (int s : mesh.face_nodes[f])
        if (std::find(cn.begin(), cn.end(), s) == cn.end()) {
          all = false;
          break;
        }
      if (all) mesh.cell_faces[k].push_back(f);
    }
  }

  try {
    mesh.finalize();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": inconsistent mesh: " + e.what());
  }
  if (declared_boundary != mesh.boundary_nodes)
    throw std::runtime_error(path + ": boundary_nodes block does not match face incidence");
  return mesh;
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);

  out << "dfnmesh " << mesh.dim << '\n';
  out << "nodes " << mesh.n_nodes() << '\n';
  for (const Vec3& x : mesh.nodes) {
    for (int a = 0; a < mesh.dim; ++a) out << (a ? " " : "") << x[a];
    out << '\n';
  }
  auto put_lists = [&](const char* kw, const std::vector<std::vector<int>>& lists) {
    out << kw << ' ' << lists.size() << '\n';
    for (const auto& l : lists) {
      out << l.size();
      for (int s : l) out << ' ' << s;
      out << '\n';
    }
  };
  put_lists("cells", mesh.cell_nodes);
  put_lists("faces", mesh.face_nodes);
  out << "fracture_faces " << mesh.n_fracture_faces() << '\n';
  for (int f : mesh.fracture_faces) out << f << ' ' << mesh.fracture_id_of_face[f] << '\n';
  out << "boundary_nodes " << mesh.boundary_nodes.size() << '\n';
  for (int s : mesh.boundary_nodes) out << s << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

void vtk_header(std::ostream& out, const Mesh& mesh) {
  out << "# vtk DataFile Version 2.0\n"
      << "dfn mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << mesh.n_nodes() << " double\n";
  out.precision(17);
  for (const Vec3& x : mesh.nodes) put_point(out, x);
}

void vtk_fields(std::ostream& out, const std::vector<VtkField>& fields, int n,
                const char* section) {
  if (fields.empty()) return;
  out << section << ' ' << n << '\n';
  for (const auto& f : fields) {
    if (int(f.values.size()) != n)
      throw std::invalid_argument("field " + f.name + " has the wrong length");
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) out << v << '\n';
  }
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<VtkField>& cell_fields,
               const std::vector<VtkField>& node_fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  vtk_header(out, mesh);

  std::vector<std::vector<int>> entries(mesh.n_cells());
  int total = 0;
  for (int k = 0; k < mesh.n_cells(); ++k) {
    if (mesh.dim == 2) {
      entries[k] = polygon_cycle(mesh, k);
    } else {
      // polyhedron face stream: nFaces, then (nPts, ids) per face
      auto& e = entries[k];
      e.push_back(int(mesh.cell_faces[k].size()));
      for (int f : mesh.cell_faces[k]) {
        e.push_back(int(mesh.face_nodes[f].size()));
        e.insert(e.end(), mesh.face_nodes[f].begin(), mesh.face_nodes[f].end());
      }
    }
    total += int(entries[k].size()) + 1;
  }
  out << "CELLS " << mesh.n_cells() << ' ' << total << '\n';
  for (const auto& e : entries) {
    out << e.size();
    for (int v : e) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (int k = 0; k < mesh.n_cells(); ++k) out << (mesh.dim == 2 ? 7 : 42) << '\n';

  vtk_fields(out, cell_fields, mesh.n_cells(), "CELL_DATA");
  vtk_fields(out, node_fields, mesh.n_nodes(), "POINT_DATA");
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_fracture_vtk(const std::string& path, const Mesh& mesh,
                        const std::vector<VtkField>& face_fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  vtk_header(out, mesh);

  const int nf = mesh.n_fracture_faces();
  int total = 0;
  for (int f : mesh.fracture_faces) total += int(mesh.face_nodes[f].size()) + 1;
  out << "CELLS " << nf << ' ' << total << '\n';
  for (int f : mesh.fracture_faces) {
    out << mesh.face_nodes[f].size();
    for (int s : mesh.face_nodes[f]) out << ' ' << s;
    out << '\n';
  }
  out << "CELL_TYPES " << nf << '\n';
  for (int i = 0; i < nf; ++i) out << (mesh.dim == 2 ? 3 : 7) << '\n';  // line / polygon

  std::vector<VtkField> fields;
  VtkField id{"fracture_id", {}};
  for (int f : mesh.fracture_faces) id.values.push_back(mesh.fracture_id_of_face[f]);
  fields.push_back(std::move(id));
  fields.insert(fields.end(), face_fields.begin(), face_fields.end());
  vtk_fields(out, fields, nf, "CELL_DATA");
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_snapshot_csv(const std::string& path, const Mesh& mesh, const DofLayout& layout,
                        const DofVector& v) {
  if (int(v.size()) != layout.size()) throw std::invalid_argument("dof vector length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "kind,id,x,y,z,value\n";
  auto row = [&](const char* kind, int id, const Vec3& x, double val) {
    out << kind << ',' << id << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << val << '\n';
  };
  for (int k = 0; k < mesh.n_cells(); ++k)
    row("cell", k, mesh.cell_center[k], v[layout.cell_gid(k)]);
  for (int s = 0; s < mesh.n_nodes(); ++s) row("node", s, mesh.nodes[s], v[layout.node_gid(s)]);
  for (int f : mesh.fracture_faces)
    row("fracture_face", f, mesh.face_center[f], v[layout.frac_gid_of_face(f)]);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dfn
