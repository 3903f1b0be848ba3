// Regenerates the shipped example assets: theories, kernels, flags and a
// worked certificate.  Usage: make_assets [output-dir]   (default: data)
#include <filesystem>
#include <iostream>
#include <string>

#include "flagcalc/algebra.hpp"
#include "flagcalc/builtin.hpp"
#include "flagcalc/io.hpp"

namespace fs = std::filesystem;
using namespace flagcalc;

namespace {

void put(const fs::path& path, const io::json& j) {
  fs::create_directories(path.parent_path());
  io::write_file(path.string(), j);
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? argv[1] : "data";

  const Theory graphs = builtin::graphs();
  const Theory tfree = builtin::triangle_free_graphs();
  const Theory digraphs = builtin::digraphs();
  const Theory hyper = builtin::hypergraphs3();

  put(root / "theories" / "graphs.json", io::theory_to_json(graphs));
  put(root / "theories" / "triangle_free.json", io::theory_to_json(tfree));
  put(root / "theories" / "digraphs.json", io::theory_to_json(digraphs));
  put(root / "theories" / "hypergraphs3.json", io::theory_to_json(hyper));

  put(root / "kernels" / "p_half.json",
      io::kernel_to_json(graphs, builtin::edge_probability_kernel(Rational(1, 2)), true));
  put(root / "kernels" / "p_three_quarters.json",
      io::kernel_to_json(graphs, builtin::edge_probability_kernel(Rational(3, 4)), true));
  // Bipartite-like: two equal-weight types, no edges within, all edges across.
  put(root / "kernels" / "two_type_cross.json",
      io::kernel_to_json(graphs,
                         builtin::two_type_kernel(Rational(1, 2), Rational(0), Rational(1),
                                                  Rational(0)),
                         true));

  const Model edge2 = builtin::graph(graphs, 2, {{0, 1}});
  const Model k3 = builtin::graph(graphs, 3, {{0, 1}, {0, 2}, {1, 2}});
  put(root / "flags" / "edge.json", io::flag_to_json(graphs, make_flag(graphs, edge2, 0)));
  put(root / "flags" / "k3.json", io::flag_to_json(graphs, make_flag(graphs, k3, 0)));

  put(root / "models" / "vertex.json",
      io::model_to_json(graphs, make_empty_model(graphs, 1)));
  put(root / "models" / "edge.json", io::model_to_json(graphs, edge2));

  Calculator calc(graphs);
  const AlgebraElement e1 = calc.from_flag(make_flag(graphs, edge2, 1));
  const AlgebraElement ebar1 =
      calc.from_flag(make_flag(graphs, builtin::graph(graphs, 2, {}), 1));
  const AlgebraElement gap = calc.combine(Rational(1), e1, Rational(-1), ebar1);
  put(root / "elements" / "edge_gap.json", io::element_to_json(calc, gap, true));

  // avg((e - ebar)^2) >= 0, certified by the square itself: residual zero.
  Certificate cert;
  cert.target = calc.average(calc.multiply(gap, gap), 0);
  cert.terms.emplace_back(gap, Rational(1));
  put(root / "certificates" / "cs_edge_gap.json", io::certificate_to_json(calc, cert));

  // Deliberately false claim; kept as a worked failure for the verifier.
  Certificate bad;
  bad.target = calc.scale(Rational(-1), calc.unit(make_empty_model(graphs, 0)));
  put(root / "certificates" / "negative_unit.json", io::certificate_to_json(calc, bad));

  return 0;
}
