// Command-line front end: sampling runs, CVP decoding, convergence
// diagnostics, and MIMO BER sweeps over flat key=value configs.
//
// Exit codes: 0 success, 1 validation error, 2 numerical/capacity error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "lgs/config.hpp"
#include "lgs/diagnostics.hpp"
#include "lgs/mimo.hpp"

namespace {

using namespace lgs;

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

Basis load_basis(const KvConfig& cfg, uint64_t seed) {
    if (cfg.has("basis")) return read_basis_file(cfg.get_string("basis"));
    if (!cfg.has("gen"))
        throw std::invalid_argument("config: need either 'basis' (file path) or 'gen'");
    const std::string gen = cfg.get_string("gen");
    std::vector<std::string> parts;
    std::istringstream ss(gen);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() >= 2 && parts[0] == "identity") {
        int n = static_cast<int>(std::stol(parts[1]));
        if (n < 1) throw std::invalid_argument("config: gen identity dimension out of range");
        return make_basis(MatrixXd::Identity(n, n));
    }
    if (parts.size() >= 3 && parts[0] == "randint") {
        int n = static_cast<int>(std::stol(parts[1]));
        int amp = static_cast<int>(std::stol(parts[2]));
        if (n < 1 || amp < 1) throw std::invalid_argument("config: gen randint parameters out of range");
        uint64_t s = parts.size() >= 4 ? std::stoull(parts[3]) : seed;
        Rng rng = Rng::derive(s, {0x67656eull});
        for (int attempt = 0; attempt < 64; ++attempt) {
            MatrixXd B(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    B(i, j) = static_cast<double>(
                        static_cast<int>(rng.bits() % (2 * amp + 1)) - amp);
            try {
                return make_basis(B);
            } catch (const singular_basis_error&) {
            }
        }
        throw numerical_error("gen randint: could not draw a full-rank matrix");
    }
    throw std::invalid_argument("config: gen must be identity:<n> or randint:<n>:<amp>[:<seed>]");
}

VectorXd load_center(const KvConfig& cfg, int n) {
    if (!cfg.has("center")) throw std::invalid_argument("config: missing required key 'center'");
    auto vals = cfg.get_doubles("center", {});
    if (static_cast<int>(vals.size()) != n)
        throw std::invalid_argument("config: key 'center' must have n entries");
    VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = vals[i];
    return c;
}

double resolve_sigma_key(const KvConfig& cfg, const Basis& basis) {
    const std::string s = cfg.get_string("sigma", "default");
    if (s == "default") return sigma_default(basis);
    if (s == "klein") return klein_sigma_default(basis).klein_variant;
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size() || !(v > 0.0)) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: key 'sigma' must be default, klein, or a positive number");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file " + path);
    return out;
}

uint64_t required_seed(const KvConfig& cfg) {
    if (!cfg.has("seed"))
        throw std::invalid_argument("config: key 'seed' is mandatory (no entropy default)");
    return static_cast<uint64_t>(cfg.get_long_required("seed", 0, std::numeric_limits<long>::max()));
}

int cmd_sample(const KvConfig& cfg, std::ostream& out) {
    const uint64_t seed = required_seed(cfg);
    Basis basis = load_basis(cfg, seed);
    VectorXd center = load_center(cfg, basis.n);
    const double sigma = resolve_sigma_key(cfg, basis);
    const double eps = cfg.get_double("eps", 0.01, 1e-9, 1.0 - 1e-9);
    const long pickups = cfg.get_long("pickups", 100, 1, 100000000);
    const int k = static_cast<int>(cfg.get_long("k", 1, 1, 1000000));
    GaussianSpec spec = make_gaussian_spec(sigma, center);

    const double delta = delta_bound(basis, spec);
    const double delta_eff = delta_mtm(delta, k);
    long gap = 1;
    if (delta_eff < 1.0 - 1e-12)
        gap = std::max<long>(1, static_cast<long>(std::ceil(mixing_time_bound(delta_eff, eps).exact)));

    out << "# n=" << basis.n << " sigma=" << fmt(sigma) << " eps=" << fmt(eps) << " k=" << k
        << "\n";
    out << "# delta=" << fmt(delta) << " delta_eff=" << fmt(delta_eff) << " gap=" << gap << "\n";

    MtmkSampler sampler = make_mtmk_sampler(basis, spec, k);
    Rng rng = Rng::derive(seed, {0x73616d70ull});
    ChainState st = make_chain_state(sampler, babai_round(basis, center).x);
    for (long p = 0; p < pickups; ++p) {
        for (long t = 0; t < gap; ++t) st = mtmk_step(sampler, st, rng).first;
        const double dist = sigma * std::sqrt(std::max(0.0, -2.0 * st.log_pi_unnorm));
        for (int i = 0; i < basis.n; ++i) out << st.x(i) << " ";
        out << fmt(dist) << "\n";
    }
    return 0;
}

int cmd_decode(const KvConfig& cfg, std::ostream& out) {
    const uint64_t seed = required_seed(cfg);
    Basis basis = load_basis(cfg, seed);
    VectorXd center = load_center(cfg, basis.n);

    DecodeConfig dc;
    dc.moves = cfg.get_long("moves", 50, 1, 1000000000);
    dc.trials_k = static_cast<int>(cfg.get_long("k", 1, 1, 1000000));
    dc.use_lll = cfg.get_bool("lll", true);
    dc.eps = cfg.get_double("eps", 0.01, 1e-9, 1.0 - 1e-9);
    dc.seed = seed;
    dc.shards = static_cast<int>(cfg.get_long("shards", 1, 1, 4096));
    const std::string s = cfg.get_string("sigma", "default");
    if (s == "klein") {
        dc.sigma_policy = SigmaPolicy::KleinLog;
    } else if (s != "default") {
        dc.sigma_policy = SigmaPolicy::Explicit;
        dc.sigma_explicit = resolve_sigma_key(cfg, basis);
    }

    DecodeResult res = decode_cvp(basis, center, dc);

    const double a = std::log(1.0 / dc.eps);
    double radius = std::nan("");
    if (static_cast<double>(dc.moves) * dc.trials_k > a) {
        Basis work = dc.use_lll ? lll_reduce(basis).basis : basis;
        radius = bdd_radius(resolve_sigma(work, dc), dc.moves, dc.eps, dc.trials_k);
    } else {
        std::cerr << "warning: moves <= ln(1/eps); decoding radius undefined\n";
    }

    out << "n=" << basis.n << "\n";
    out << "x_cvp=";
    for (int i = 0; i < basis.n; ++i) out << (i ? " " : "") << res.x_cvp(i);
    out << "\n";
    out << "distance=" << fmt(res.distance) << "\n";
    out << "moves_used=" << res.moves_used << "\n";
    out << "acceptance_rate=" << fmt(res.acceptance_rate) << "\n";
    out << "improved_at=";
    for (size_t i = 0; i < res.improved_at.size(); ++i)
        out << (i ? "," : "") << res.improved_at[i];
    out << "\n";
    out << "k=" << dc.trials_k << "\n";
    out << "use_lll=" << (dc.use_lll ? 1 : 0) << "\n";
    out << "bdd_radius=" << fmt(radius) << "\n";
    return 0;
}

int cmd_diagnose(const KvConfig& cfg, std::ostream& out) {
    const uint64_t seed = required_seed(cfg);
    Basis basis = load_basis(cfg, seed);
    VectorXd center = load_center(cfg, basis.n);
    const double sigma = resolve_sigma_key(cfg, basis);
    const double eps = cfg.get_double("eps", 0.01, 1e-9, 1.0 - 1e-9);
    const long replicates = cfg.get_long("replicates", 20000, 0, 100000000);
    const long tmax = cfg.get_long("tmax", 15, 1, 10000);
    GaussianSpec spec = make_gaussian_spec(sigma, center);

    TruncatedStateSpace space = exact_target(basis, spec);
    MatrixXd P = build_mhk_matrix(space);
    SpectralCheck sc = spectral_radius_check(P, space);
    const double delta = delta_bound(basis, spec);

    out << "n=" << basis.n << "\n";
    out << "states=" << space.states.size() << "\n";
    out << "covered_mass=" << fmt(space.covered_mass, "%.15g") << "\n";
    out << "delta=" << fmt(delta) << "\n";
    for (long k : {1L, 2L, 5L, 10L})
        out << "delta_mtm_k" << k << "=" << fmt(delta_mtm(delta, static_cast<int>(k))) << "\n";
    out << "tau1=" << fmt(sc.tau1) << "\n";
    out << "tau1_predicted=" << fmt(sc.predicted) << "\n";
    out << "tau1_abs_err=" << fmt(std::abs(sc.tau1 - sc.predicted)) << "\n";
    if (delta < 1.0 - 1e-12) {
        MixingTime mt = mixing_time_bound(delta, eps);
        out << "tmix_exact=" << fmt(mt.exact) << "\n";
        out << "tmix_upper=" << fmt(mt.upper) << "\n";
    } else {
        out << "tmix_exact=1\n";
        out << "tmix_upper=1\n";
    }

    if (replicates > 0) {
        // empirical TV(law of X_t, pi) against the (1-delta)^t envelope
        MhkSampler sampler{space.proposal};
        VectorXi x0 = babai_round(basis, center).x;
        std::map<std::vector<int>, int> index;
        for (size_t i = 0; i < space.states.size(); ++i) {
            std::vector<int> key(space.states[i].data(),
                                 space.states[i].data() + space.states[i].size());
            index[key] = static_cast<int>(i);
        }
        MatrixXd hist = MatrixXd::Zero(tmax, static_cast<Eigen::Index>(space.states.size()));
        VectorXd other = VectorXd::Zero(tmax);
        for (long r = 0; r < replicates; ++r) {
            Rng rng = Rng::derive(seed, {0x64696167ull, static_cast<uint64_t>(r)});
            ChainState st = make_chain_state(sampler, x0);
            for (long t = 0; t < tmax; ++t) {
                st = mhk_step(sampler, st, rng).first;
                std::vector<int> key(st.x.data(), st.x.data() + st.x.size());
                auto it = index.find(key);
                if (it == index.end())
                    other(t) += 1.0;
                else
                    hist(t, it->second) += 1.0;
            }
        }
        for (long t = 0; t < tmax; ++t) {
            VectorXd emp = hist.row(t).transpose() / static_cast<double>(replicates);
            double tv = 0.5 * ((emp - space.pi).lpNorm<1>() + other(t) / replicates);
            out << "tv_t" << (t + 1) << "=" << fmt(tv) << "\n";
            out << "bound_t" << (t + 1) << "=" << fmt(std::pow(1.0 - delta, t + 1)) << "\n";
        }
    }
    return 0;
}

std::vector<DetectorSpec> parse_detectors(const KvConfig& cfg, int k) {
    std::vector<DetectorSpec> out;
    std::istringstream ss(cfg.get_string("detectors", "zf,mhk"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        DetectorSpec d;
        std::string name = tok;
        const std::string suffix = "+lll";
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            d.use_lll = true;
            name = name.substr(0, name.size() - suffix.size());
        }
        if (name == "zf") d.kind = Detector::ZF;
        else if (name == "gibbs") d.kind = Detector::Gibbs;
        else if (name == "mhk") d.kind = Detector::MHK;
        else if (name == "mtmk") { d.kind = Detector::MTMK; d.k = k; }
        else throw std::invalid_argument("config: unknown detector '" + tok + "'");
        out.push_back(d);
    }
    if (out.empty()) throw std::invalid_argument("config: key 'detectors' is empty");
    return out;
}

void write_csv_rows(std::ostream& out, const SimResult& res) {
    for (const auto& r : res.rows) {
        out << fmt(r.ebn0_db, "%.6g") << "," << r.detector << "," << (r.use_lll ? 1 : 0) << ","
            << r.moves << "," << r.k << "," << r.frames << "," << r.bit_errors << ","
            << r.bits_total << "," << fmt(r.ber, "%.6g") << ","
            << fmt(r.mean_acceptance, "%.6g") << "\n";
    }
}

int cmd_ber(const KvConfig& cfg, std::ostream& out) {
    MimoConfig mc;
    mc.seed = required_seed(cfg);
    mc.n_antennas = static_cast<int>(cfg.get_long("n", 4, 1, 64));
    mc.qam_order = static_cast<int>(cfg.get_long("qam", 16, 4, 4096));
    mc.ebn0_db = cfg.get_doubles("ebn0", {15.0});
    mc.frames = cfg.get_long("frames", 1000, 1, 100000000);
    mc.trials_k = static_cast<int>(cfg.get_long("k", 10, 1, 1000000));
    mc.validate();
    auto detectors = parse_detectors(cfg, mc.trials_k);

    out << "ebn0_db,detector,use_lll,moves,k,frames,bit_errors,bits_total,ber,mean_acceptance\n";
    if (cfg.has("moves_list")) {
        // moves sweep at fixed SNR
        if (mc.ebn0_db.size() != 1)
            throw std::invalid_argument("config: moves_list requires a single ebn0 value");
        for (double mv : cfg.get_doubles("moves_list", {})) {
            if (mv < 1) throw std::invalid_argument("config: key 'moves_list' out of range");
            mc.moves = static_cast<long>(mv);
            write_csv_rows(out, run_ber_sweep(mc, detectors));
        }
    } else {
        mc.moves = cfg.get_long("moves", 20, 1, 1000000000);
        write_csv_rows(out, run_ber_sweep(mc, detectors));
    }
    return 0;
}

struct SubArgs {
    std::string config_path;
    std::string out_path;
    std::string seed;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config_path, "key=value config file");
    sub->add_option("--seed", args.seed, "master seed (mandatory here or in the config)");
    sub->add_option("--out", args.out_path, "output file (default: stdout)");
    sub->add_option("--set", args.sets, "override config entries, repeatable: --set key=value");
}

KvConfig build_config(const SubArgs& args) {
    KvConfig cfg;
    if (!args.config_path.empty()) cfg.load_file(args.config_path);
    for (const auto& s : args.sets) cfg.set(s);
    if (!args.seed.empty()) cfg.set("seed=" + args.seed);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice Gaussian sampling and MCMC lattice decoding"};
    app.require_subcommand(1);
    SubArgs a_sample, a_decode, a_diagnose, a_ber;
    CLI::App* s_sample = app.add_subcommand("sample", "draw lattice Gaussian samples");
    CLI::App* s_decode = app.add_subcommand("decode", "solve a CVP instance");
    CLI::App* s_diagnose = app.add_subcommand("diagnose", "convergence diagnostics report");
    CLI::App* s_ber = app.add_subcommand("ber", "MIMO detection BER sweep");
    add_common(s_sample, a_sample);
    add_common(s_decode, a_decode);
    add_common(s_diagnose, a_diagnose);
    add_common(s_ber, a_ber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const SubArgs& args = s_sample->parsed()     ? a_sample
                              : s_decode->parsed()   ? a_decode
                              : s_diagnose->parsed() ? a_diagnose
                                                     : a_ber;
        KvConfig cfg = build_config(args);
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!args.out_path.empty()) {
            file = open_out(args.out_path);
            out = &file;
        }
        if (s_sample->parsed()) return cmd_sample(cfg, *out);
        if (s_decode->parsed()) return cmd_decode(cfg, *out);
        if (s_diagnose->parsed()) return cmd_diagnose(cfg, *out);
        return cmd_ber(cfg, *out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
