#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "fibcoalg/engine.hpp"

namespace {

using namespace fibcoalg;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

KripkeFrame ring_frame(std::size_t n) {
  KripkeFrame k;
  k.succ.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    k.states.push_back("s" + std::to_string(i));
    k.succ[i] = {(i + 1) % n, (i * i + 1) % n};
  }
  return k;
}

void BM_KripkeEval(benchmark::State& state) {
  FibredSignature sig;
  Structure st;
  install_classical(sig, st, {});
  st.signature = &sig;
  Coalgebra c = kripke_coalgebra(ring_frame(std::size_t(state.range(0))));
  FormulaPtr phi = parse_formula(
      "box(box(box(T) & !box(F))) & !box(!box(box(T)))", sig, {},
      FibObject::gen("P"));
  for (auto _ : state) {
    StateSet s = eval_formula(st, *phi, c);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_KripkeEval)->Arg(16)->Arg(64)->Arg(256);

void BM_JacobiEigen(benchmark::State& state) {
  ComplexMatrix m =
      embed_operator(bell_observable(), {1, 2}, int(state.range(0)));
  for (auto _ : state) {
    auto pairs = hermitian_eigendecomposition(m);
    benchmark::DoNotOptimize(pairs);
  }
}
BENCHMARK(BM_JacobiEigen)->Arg(2)->Arg(3)->Arg(4)->Arg(5);

void BM_TeleportPipeline(benchmark::State& state) {
  const std::string model_text =
      "model quantum\nqubits 3\n"
      "state phi := vec(0.6, 0.8)\n"
      "state bellpair := bell(1)\n"
      "state init := kron(phi, bellpair)\n"
      "obs A_bell := bellobs\n"
      "unitary U1 := I\nunitary U2 := Z\nunitary U3 := X\nunitary U4 := X*Z\n"
      "carrier init\ninitial init\n";
  const std::string doc = slurp(FIBCOALG_MODELS_DIR "/teleport_full.fml");
  for (auto _ : state) {
    auto bm = build_model(load_model(model_text, {}));
    CheckReport rep = run_check(*bm, doc, {});
    benchmark::DoNotOptimize(rep.holds);
  }
}
BENCHMARK(BM_TeleportPipeline);

}  // namespace

BENCHMARK_MAIN();
