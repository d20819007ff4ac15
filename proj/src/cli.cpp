#include "subspec/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "subspec/catalog.hpp"
#include "subspec/errors.hpp"
#include "subspec/report.hpp"

namespace subspec {

namespace {

using nlohmann::json;

std::uint64_t env_seed() {
  const char* v = std::getenv("SUBSPEC_SEED");
  if (!v || !*v) return 1;
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument("trailing");
    return s;
  } catch (const std::exception&) {
    throw InputError(std::string("SUBSPEC_SEED is not an unsigned integer: '") + v + "'");
  }
}

// Primary output: --out PATH or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

Substitution load(const std::string& source, const std::vector<std::string>& rules) {
  if (!source.empty() && !rules.empty()) throw InputError("give either a rule source or --rule, not both");
  if (!rules.empty()) {
    std::string text;
    for (const auto& r : rules) text += r + "\n";
    return parse_substitution(text);
  }
  if (source.empty()) throw InputError("missing rule file, catalog:NAME or --rule");
  return load_substitution(source);
}

Substitution load_primitive(const std::string& source, const std::vector<std::string>& rules) {
  Substitution z = load(source, rules);
  if (!is_primitive(z).primitive) throw PreconditionError("substitution is not primitive");
  return z;
}

void check_format(const std::string& f) {
  if (f != "json" && f != "csv") throw InputError("--format must be json or csv");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  AnalysisConfig cfg;
  std::string source;
  std::vector<std::string> rules;
  std::vector<double> range;
  std::vector<double> heights;
  std::optional<std::uint64_t> seed;
  bool self_similar = false;

  CLI::App app{"Spectral analysis of primitive substitutions", "subspec"};
  app.require_subcommand(1, 1);
  auto common = [&](CLI::App* sub, bool takes_rules) {
    sub->add_option("source", source, "rule file or catalog:NAME");
    if (takes_rules) sub->add_option("--rule", rules, "rule such as 0->01 (repeatable)");
    sub->add_option("--grid", cfg.grid, "number of grid points");
    sub->add_option("--level", cfg.level, "level n of the approximant");
    sub->add_option("--depth", cfg.depth, "depth K");
    sub->add_option("--samples", cfg.samples, "Monte Carlo samples");
    sub->add_option("--seed", seed, "random seed (default $SUBSPEC_SEED, else 1)");
    sub->add_option("--range", range, "frequency range A B")->expected(2);
    sub->add_flag("--self-similar", self_similar, "self-similar tile lengths");
    sub->add_option("--heights", heights, "explicit tile lengths v1,v2,...")->delimiter(',');
    sub->add_option("--scalar", cfg.scalar, "weight vector b1,b2,...")->delimiter(',');
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--format", cfg.format, "json or csv");
    return sub;
  };
  auto* analyze = common(app.add_subcommand("analyze", "matrix, Perron data and spectral classification"), true);
  auto* riesz = common(app.add_subcommand("riesz", "matrix Riesz-product density on a grid"), true);
  auto* lyap = common(app.add_subcommand("lyapunov", "top Lyapunov exponent and singularity verdict"), true);
  auto* scan = common(app.add_subcommand("scan", "eigenvalue candidates via return words"), true);
  scan->add_option("--epsilon", cfg.epsilon, "distance threshold");
  auto* diffract = common(app.add_subcommand("diffract", "autocorrelation and diffraction of a tile type"), true);
  diffract->add_option("--symbol", cfg.symbol, "tile type (default: first letter)");
  diffract->add_option("--window", cfg.window, "window length R");
  auto* bern = common(app.add_subcommand("bernoulli", "Fourier transform of a Bernoulli convolution"), false);
  bern->add_option("--lambda", cfg.lambda, "contraction ratio in (0,1)");
  bern->add_option("--p", cfg.p, "weight in (0,1)");
  bern->add_option("--terms", cfg.terms, "number of product terms");
  auto* cat = common(app.add_subcommand("catalog", "list built-in substitutions, or print one"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    check_format(cfg.format);
    cfg.seed = seed ? *seed : env_seed();
    if (!range.empty()) {
      cfg.lo = range[0];
      cfg.hi = range[1];
    }
    if (self_similar && !heights.empty()) throw InputError("--self-similar and --heights are exclusive");
    if (self_similar) cfg.mode = SuspensionMode::SelfSimilar;
    if (!heights.empty()) {
      cfg.mode = SuspensionMode::Explicit;
      cfg.heights.assign(heights.begin(), heights.end());
    }
    if (cfg.threads < 1) throw InputError("--threads must be positive");

    if (*analyze) {
      const auto z = load(source, rules);
      const json rep = analysis_report(z, cfg);
      Sink sink(cfg.out, out);
      *sink << rep.dump(2) << "\n";
    } else if (*riesz) {
      const auto z = load_primitive(source, rules);
      const auto s = cfg.suspension(z);
      DensityGrid g = riesz_density(z, cfg.level, cfg.frequency_grid(), s, cfg.threads);
      if (!cfg.scalar.empty()) g = contract(g, std::vector<std::complex<double>>(cfg.scalar.begin(), cfg.scalar.end()));
      Sink sink(cfg.out, out);
      if (cfg.format == "csv" || riesz->count("--format") == 0)
        g.write_csv(*sink);
      else
        *sink << density_json(g).dump(2) << "\n";
    } else if (*lyap) {
      const auto z = load_primitive(source, rules);
      const auto outcome = lyapunov_analysis(z, cfg);
      const json rep = lyapunov_report(z, outcome, cfg);
      if (cfg.format == "csv") {
        Sink sink(cfg.out, out);
        if (outcome.estimate) write_exponent_csv(*sink, *outcome.estimate);
        if (!cfg.out.empty()) {
          std::ofstream v(cfg.out + ".json");
          if (!v) throw InputError("cannot open output file '" + cfg.out + ".json'");
          v << rep.dump(2) << "\n";
        } else {
          err << rep["verdict"].dump() << "\n";
        }
      } else {
        Sink sink(cfg.out, out);
        *sink << rep.dump(2) << "\n";
      }
    } else if (*scan) {
      const auto z = load_primitive(source, rules);
      const auto s = cfg.suspension(z);
      const int K = scan->count("--depth") ? cfg.depth : 30;
      if (scan->count("--grid") == 0) cfg.grid = 4096;
      const auto res = eigenvalue_scan(z, s, cfg.frequency_grid(), K, cfg.epsilon, cfg.threads);
      Sink sink(cfg.out, out);
      if (cfg.format == "csv" || scan->count("--format") == 0) {
        res.write_csv(*sink);
      } else {
        json j;
        j["schema"] = kReportSchema;
        j["K"] = res.K;
        j["epsilon"] = res.epsilon;
        auto w = json::array();
        for (const auto& v : res.words) w.push_back(z.format(v));
        j["return_words"] = w;
        j["candidates"] = res.candidates();
        *sink << j.dump(2) << "\n";
      }
    } else if (*diffract) {
      const auto z = load_primitive(source, rules);
      const auto s = cfg.suspension(z);
      Letter a = 0;
      if (!cfg.symbol.empty()) {
        const auto w = z.parse_word(cfg.symbol);
        if (w.size() != 1) throw InputError("--symbol must name one letter");
        a = w[0];
      }
      const auto res = diffraction_autocorrelation(z, s, a, cfg.window, cfg.frequency_grid(), 0, cfg.threads);
      Sink sink(cfg.out, out);
      if (cfg.format == "csv" || diffract->count("--format") == 0) {
        res.diffraction.write_csv(*sink);
      } else {
        json j;
        j["schema"] = kReportSchema;
        j["mass_at_zero"] = res.mass_at_zero;
        j["points"] = res.points;
        auto ac = json::array();
        for (const auto& [r, w] : res.autocorrelation) ac.push_back({r, w});
        j["autocorrelation"] = ac;
        j["diffraction"] = density_json(res.diffraction);
        *sink << j.dump(2) << "\n";
      }
    } else if (*bern) {
      const auto g = cfg.frequency_grid();
      if (g.points == 0 || !(g.hi > g.lo)) throw PreconditionError("empty frequency range");
      Sink sink(cfg.out, out);
      if (cfg.format == "json" && bern->count("--format")) {
        json j;
        j["lambda"] = cfg.lambda;
        j["p"] = cfg.p;
        j["terms"] = cfg.terms;
        auto rows = json::array();
        for (std::size_t i = 0; i < g.points; ++i) {
          const auto v = bernoulli_fourier(cfg.lambda, cfg.p, g.omega(i), cfg.terms);
          rows.push_back({{"xi", g.omega(i)}, {"re", v.value.real()}, {"im", v.value.imag()}, {"tail_bound", v.tail_bound}});
        }
        j["values"] = rows;
        *sink << j.dump(2) << "\n";
      } else {
        *sink << std::setprecision(17) << "xi,re,im,abs,tail_bound\n";
        for (std::size_t i = 0; i < g.points; ++i) {
          const auto v = bernoulli_fourier(cfg.lambda, cfg.p, g.omega(i), cfg.terms);
          *sink << g.omega(i) << "," << v.value.real() << "," << v.value.imag() << "," << std::abs(v.value) << ","
                << v.tail_bound << "\n";
        }
      }
    } else if (*cat) {
      Sink sink(cfg.out, out);
      if (source.empty()) {
        if (cfg.format == "json" && cat->count("--format")) {
          *sink << json(catalog_names()).dump() << "\n";
        } else {
          for (const auto& e : catalog_entries()) *sink << e.name << "\n";
        }
      } else {
        const std::string name = source.rfind("catalog:", 0) == 0 ? source.substr(8) : source;
        *sink << catalog_lookup(name).to_dsl();
      }
    }
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace subspec
