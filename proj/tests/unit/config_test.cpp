#include "levynls/config.hpp"
#include "levynls/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace levynls {
namespace {

void parse_and_validate(const std::string& text) { validate_config(parse_config(text)); }

const char* kFull = R"([domain]
kind = torus1d
length = 6.5
beta = 0.75
max_level = 5
dealias = 3

[galerkin]
levels = 3, 5, 4

[nonlinearity]
alpha = 2.5
sign = focusing

[noise]
symbols = cos kx=1 amp=0.5; bump x0=1 width=0.3 amp=2

[measure]
kind = atomic
atoms = 1 0.3 0.1; 2.5 -0.2 0.05
epsilon = 0.2

[initial]
kind = modes
modes = kx=1 re=0.5 im=-0.25; kx=-2 re=1

[solver]
mode = splitstep
dt = 0.002
tolerance = 1e-11
closure = taylor2
horizon = 0.3

[run]
trajectories = 7
seed = 123456789012345
threads = 2
out = results
events = true

[moments]
orders = 1, 3
thetas = 0, 0.1
eta = 0.2
stopping = first_jump
t0 = 0.05

[verify]
trials = 10
inject_fault = hermitian
)";

TEST(Config, DefaultsAreValid) {
  const RunConfig c = parse_config("");
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(c.levels, std::vector<int>{6});
  EXPECT_TRUE(std::holds_alternative<Torus1D>(c.domain));
  EXPECT_EQ(c.verify.inject_fault, "none");
}

TEST(Config, ParsesEverySection) {
  const RunConfig c = parse_config(kFull);
  EXPECT_DOUBLE_EQ(std::get<Torus1D>(c.domain).length, 6.5);
  EXPECT_DOUBLE_EQ(c.beta, 0.75);
  EXPECT_EQ(c.dealias, 3);
  EXPECT_EQ(c.levels, (std::vector<int>{3, 5, 4}));
  EXPECT_EQ(c.nonlinearity.sign, NonlinearitySign::Focusing);
  ASSERT_EQ(c.symbols.size(), 2u);
  EXPECT_EQ(c.symbols[1].kind, NoiseSymbol::Kind::Bump);
  EXPECT_DOUBLE_EQ(c.symbols[1].width, 0.3);
  const auto& atoms = std::get<AtomicMeasure>(c.measure.kind).atoms;
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_DOUBLE_EQ(atoms[1].weight, 2.5);
  EXPECT_DOUBLE_EQ(atoms[1].mark[1], 0.05);
  EXPECT_EQ(c.initial.modes.size(), 2u);
  EXPECT_EQ(c.initial.modes[1].wavenumber.k1, -2);
  EXPECT_EQ(c.solver.mode, SolverMode::SplitStep);
  EXPECT_EQ(c.solver.closure, ClosureMode::Taylor2);
  EXPECT_DOUBLE_EQ(c.horizon, 0.3);
  EXPECT_EQ(c.seed, 123456789012345ULL);
  EXPECT_TRUE(c.events);
  EXPECT_FALSE(c.snapshots);
  EXPECT_EQ(c.stopping.kind, StoppingRule::Kind::FirstJumpAfter);
  EXPECT_EQ(c.verify.trials, 10);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, SerializationRoundTripsExactly) {
  for (const char* text : {"", kFull}) {
    const std::string once = serialize_config(parse_config(text));
    EXPECT_EQ(serialize_config(parse_config(once)), once);
  }
  RunConfig c;
  c.beta = 0.1 + 0.2;  // not representable in a short decimal
  c.measure = {RadialStableMeasure{0.3, 1.7, 1}, 1.0 / 3.0};
  c.domain = Torus2D{1.0 / 7.0, 2.0};
  c.symbols = {NoiseSymbol{NoiseSymbol::Kind::Sin, 1.0 / 3.0, 1, 2}};
  const RunConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back.beta, c.beta);
  EXPECT_EQ(back.measure.epsilon, c.measure.epsilon);
  EXPECT_EQ(std::get<Torus2D>(back.domain).length_x, 1.0 / 7.0);
  EXPECT_EQ(back.symbols[0].ky, 2);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashTracksContentButNotDestination) {
  RunConfig a;
  RunConfig b = a;
  b.out_dir = "elsewhere";
  b.threads = 8;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("[domain]\nunknown_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[domain]\nbeta = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("[domain]\nmax_level = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[domain]\nkind = sphere\n"), ConfigError);
  EXPECT_THROW(parse_config("[noise]\nsymbols = tan kx=1\n"), ConfigError);
  EXPECT_THROW(parse_config("[measure]\natoms = 1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/levynls.ini"), IoError);
}

TEST(Config, RejectsInconsistentModels) {
  // Focusing quintic in one dimension is critical.
  EXPECT_THROW(parse_and_validate("[nonlinearity]\nalpha = 5\nsign = focusing\n"), ConfigError);
  // A stable measure needs a positive truncation radius.
  EXPECT_THROW(parse_and_validate("[measure]\nkind = radial_stable\nepsilon = 0\n"), ConfigError);
  EXPECT_THROW(parse_and_validate("[measure]\natoms = 1 0.3 0.2\n"), ConfigError);
  EXPECT_THROW(parse_and_validate("[galerkin]\nlevels = 7\n"), ConfigError);
  EXPECT_THROW(parse_and_validate("[measure]\natoms = 1 1.5\n"), ConfigError);
  EXPECT_THROW(parse_and_validate("[solver]\nclosure = atomic_exact\n[measure]\nkind = radial_stable\nepsilon = 0.1\n"),
               ConfigError);
  EXPECT_THROW(parse_and_validate("[run]\ntrajectories = 0\n"), ConfigError);
  EXPECT_NO_THROW(parse_and_validate("[measure]\natoms =\n[noise]\nsymbols =\n"));
}

TEST(Config, InitialData) {
  RunConfig c = parse_config("[domain]\nmax_level = 4\n[initial]\nkind = modes\nmodes = kx=2 re=0.5 im=1\n");
  const auto model = build_model(c);
  const Coeffs u = build_initial(c, *model);
  const auto idx = model->find_mode({2, 0});
  EXPECT_EQ(u[idx], std::complex<double>(0.5, 1.0));
  EXPECT_EQ(u.norm(), std::abs(u[idx]));

  c.initial.modes = {{{40, 0}, 1.0}};
  EXPECT_THROW(build_initial(c, *model), ConfigError);

  c.initial.kind = InitialSpec::Kind::Decay;
  c.initial.power = 1.0;
  const Coeffs d = build_initial(c, *model);
  for (Eigen::Index i = 0; i < d.size(); ++i) EXPECT_NEAR(std::abs(d[i]), 1.0 / model->eigenvalues_S()[i], 1e-15);

  // A centred Gaussian on the torus has real, even coefficients.
  c.initial.kind = InitialSpec::Kind::Gaussian;
  const Coeffs g = build_initial(c, *model);
  EXPECT_NEAR(std::abs(g[model->find_mode({1, 0})] - std::conj(g[model->find_mode({-1, 0})])), 0.0, 1e-12);
  EXPECT_GT(g[0].real(), 0.0);
}

}  // namespace
}  // namespace levynls
