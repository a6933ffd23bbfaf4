// nagtrace: witness sets, monodromy decomposition, trace tests and multidegrees from the command line.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "nagtrace/multihomog.hpp"
#include "nagtrace/serialize.hpp"

using namespace nagtrace;

namespace {

constexpr int kOk = 0;
constexpr int kInput = 1;
constexpr int kNumeric = 2;

struct InputError : Error {
  using Error::Error;
};

struct RunConfig {
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int threads = 1;
  std::string out;

  int thread_count() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(item, &used);
      if (used != item.size() || d < 0) throw std::invalid_argument(item);
      dims.push_back(d);
    } catch (const std::exception&) {
      throw InputError("--dims expects comma-separated nonnegative integers, got '" + text + "'");
    }
  }
  if (dims.empty()) throw InputError("--dims is empty");
  return dims;
}

void emit(const Json& j, const RunConfig& rc) {
  const std::string text = j.dump(2) + "\n";
  if (rc.out.empty() || rc.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(rc.out);
  if (!out) throw InputError("cannot write '" + rc.out + "'");
  out << text;
}

WitnessOptions witness_options(const RunConfig& rc) {
  WitnessOptions opts;
  opts.threads = rc.thread_count();
  return opts;
}

Json big_integer(const boost::multiprecision::cpp_int& n) {
  if (n <= std::numeric_limits<std::int64_t>::max()) return static_cast<std::int64_t>(n);
  return n.str();
}

int run_witness(const std::string& path, const std::string& dims_text, int m, const RunConfig& rc) {
  const PolySystem system = parse_system(read_file(path));
  if (m > 0) {
    emit(to_json(witness_collection(system, m, rc.seed, witness_options(rc))), rc);
    return kOk;
  }
  std::vector<int> dims;
  if (!dims_text.empty()) {
    dims = parse_dims(dims_text);
  } else if (system.num_groups() == 1) {
    dims = {variety_dimension(system)};
  } else {
    throw InputError("give --dims or --m for a multiprojective system");
  }
  emit(to_json(witness_set(system, dims, rc.seed, witness_options(rc))), rc);
  return kOk;
}

int run_decompose(const std::string& path, const std::string& dims_text, int budget, const RunConfig& rc) {
  const PolySystem system = parse_system(read_file(path));
  const std::vector<int> dims = dims_text.empty() ? std::vector<int>{variety_dimension(system)} : parse_dims(dims_text);
  if (budget < 1) throw InputError("--budget must be positive");
  std::mt19937_64 rng(rc.seed);
  const std::uint64_t witness_seed = rng(), monodromy_seed = rng();
  const WitnessSet w = witness_set(system, dims, witness_seed, witness_options(rc));
  const Partition part = monodromy_partition(w, budget, monodromy_seed, {}, rc.thread_count());
  if (part.warning) std::cerr << "warning: " << part.loops_failed << " monodromy loops failed\n";

  Json blocks = Json::array();
  bool all = true;
  for (const auto& block : part.blocks) {
    Json b = {{"indices", block}, {"size", block.size()}};
    try {
      const TraceTestResult r = trace_test(w, block, rng(), {}, rc.tol, rc.thread_count());
      b["trace"] = to_json(r);
      all = all && r.complete;
    } catch (const GenericityFailure& e) {
      b["error"] = e.what();
      all = false;
    }
    blocks.push_back(b);
  }
  emit({{"witness", to_json(w)}, {"partition", to_json(part)}, {"blocks", blocks}, {"complete", all}}, rc);
  return all ? kOk : kNumeric;
}

int run_mtrace(const std::string& path, const std::string& collection_path, const RunConfig& rc) {
  const PolySystem system = parse_system(read_file(path));
  const WitnessCollection coll = collection_from_json(parse_json(read_file(collection_path)), system);
  const MTraceReport report = multihomogeneous_trace_test(system, coll, rc.seed, {}, rc.tol, rc.thread_count());
  emit(to_json(report), rc);
  return report.complete ? kOk : kNumeric;
}

int run_multidegree(const std::string& path, int m, const RunConfig& rc) {
  const PolySystem system = parse_system(read_file(path));
  const int dim = m > 0 ? m : variety_dimension(system);
  const MultiDegree md = multidegree(witness_collection(system, dim, rc.seed, witness_options(rc)));
  emit({{"multidegree", to_json(md)}, {"segre_degree", big_integer(segre_degree(md))},
        {"log_concave", check_log_concavity(md)}},
       rc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical witness sets and trace tests for (multi)projective varieties"};
  app.require_subcommand(1);
  RunConfig rc;
  auto shared = [&rc](CLI::App* sub) {
    sub->add_option("--seed", rc.seed, "random seed")->capture_default_str();
    sub->add_option("--tol", rc.tol, "trace test tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--threads", rc.threads, "tracker threads (0 = all cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--out", rc.out, "output file (default stdout)");
  };

  std::string system_path, dims, collection_path;
  int m = 0, budget = 30;

  auto* witness = app.add_subcommand("witness", "compute a witness set or a witness collection");
  witness->add_option("system", system_path, "system file")->required();
  witness->add_option("--dims", dims, "slice codimension per group, e.g. 1 or 0,1");
  witness->add_option("--m", m, "compute every W_{m1,m2} with m1 + m2 = m");
  shared(witness);

  auto* decompose = app.add_subcommand("decompose", "monodromy partition and trace test per block");
  decompose->add_option("system", system_path, "system file")->required();
  decompose->add_option("--dims", dims, "slice codimension per group");
  decompose->add_option("--budget", budget, "maximum monodromy loops")->capture_default_str();
  shared(decompose);

  auto* mtrace = app.add_subcommand("mtrace", "multihomogeneous trace test on a witness collection");
  mtrace->add_option("system", system_path, "system file")->required();
  mtrace->add_option("collection", collection_path, "witness collection JSON")->required();
  shared(mtrace);

  auto* mdeg = app.add_subcommand("multidegree", "multidegree, Segre degree and log-concavity");
  mdeg->add_option("system", system_path, "system file")->required();
  mdeg->add_option("--m", m, "variety dimension (default: from the system)");
  shared(mdeg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*witness) return run_witness(system_path, dims, m, rc);
    if (*decompose) return run_decompose(system_path, dims, budget, rc);
    if (*mtrace) return run_mtrace(system_path, collection_path, rc);
    if (*mdeg) return run_multidegree(system_path, m, rc);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kInput;
}
