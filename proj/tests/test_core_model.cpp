#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "finjj/constants.hpp"
#include "finjj/core_model.hpp"
#include "finjj/errors.hpp"
#include "oracle.hpp"

using namespace finjj;

TEST_SUITE("core_model") {

TEST_CASE("Bose-Hubbard couplings map onto circuit parameters") {
  const CircuitParams a = map_bose_hubbard({1.0, 0.0, 1.0, 2});
  CHECK(a.e_j == 2.0);
  CHECK(a.e_c == 2.0);
  CHECK(a.n_g == 0.0);
  CHECK(a.n_half() == 1.0);

  const CircuitParams b = map_bose_hubbard({0.5, -1.0, 0.25, 4});
  CHECK(b.e_j == 1.0);
  CHECK(b.e_c == 1.0);
  CHECK(b.n_g == 1.0);
  CHECK(b.n_half() == 2.0);
}

TEST_CASE("Bose-Hubbard map round-trips") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(1e-3, 1e3);
  std::uniform_real_distribution<double> bias(-1e3, 1e3);
  std::uniform_int_distribution<std::int64_t> pairs(1, 1'000'000'000);
  for (int i = 0; i < 500; ++i) {
    const BoseHubbardParams bh{pos(rng), bias(rng), pos(rng), pairs(rng)};
    const BoseHubbardParams back = map_to_bose_hubbard(map_bose_hubbard(bh));
    CHECK(oracle::rel(back.lambda, bh.lambda) < 1e-14);
    CHECK(oracle::rel(back.mu, bh.mu, 1e-300) < 1e-14);
    CHECK(oracle::rel(back.nu, bh.nu) < 1e-14);
    CHECK(back.pairs_total == bh.pairs_total);
  }
}

TEST_CASE("invalid couplings are rejected") {
  CHECK_THROWS_AS(map_bose_hubbard({0.0, 0.0, 1.0, 2}), DomainError);
  CHECK_THROWS_AS(map_bose_hubbard({1.0, 0.0, -1.0, 2}), DomainError);
  CHECK_THROWS_AS(map_bose_hubbard({1.0, 0.0, 1.0, 0}), DomainError);
  CHECK_THROWS_AS(validate(CircuitParams{-1.0, 1.0, 0.0, 2}), DomainError);
  CHECK_THROWS_AS(validate(CircuitParams{1.0, 0.0, 0.0, 2}), DomainError);
  CHECK_THROWS_AS(validate(CircuitParams{1.0, 1.0, std::nan(""), 2}), DomainError);
  CHECK_NOTHROW(validate(CircuitParams{1.0, 1.0, 1e9, 2}));
}

TEST_CASE("Cooper-pair density from the London depth") {
  const MaterialProps al = aluminum();
  // m_e / (2 mu_0 e^2 lambda^2) with the constants written out.
  const double e = 1.602176634e-19;
  const double expected = 9.1093837015e-31 / (2.0 * 1.25663706212e-6 * e * e * 16e-9 * 16e-9);
  CHECK(oracle::rel(cooper_pair_density(al), expected) < 1e-12);
  CHECK(cooper_pair_density(al) == doctest::Approx(5.5155443735923471e28).epsilon(1e-12));
  CHECK(oracle::rel(cooper_pair_density(al), 5.5e28) < 0.01);

  MaterialProps deeper = al;
  deeper.london_depth *= 2.0;
  CHECK(oracle::rel(cooper_pair_density(deeper), cooper_pair_density(al) / 4.0) < 1e-14);
}

TEST_CASE("minimum island size for aluminum") {
  const ValidityReport r = validity_min_pairs(aluminum());
  CHECK(oracle::rel(r.n_min, 1.0e4) < 0.05);
  CHECK(r.n_min == doctest::Approx(10446.515058445544).epsilon(1e-12));
  CHECK(oracle::rel(r.n_s, cooper_pair_density(aluminum())) < 1e-15);
}

TEST_CASE("minimum island size scales with its inputs") {
  const MaterialProps al = aluminum();
  const double base = validity_min_pairs(al).n_min;

  MaterialProps m = al;
  m.gap /= 2.0;
  CHECK(oracle::rel(validity_min_pairs(m).n_min, 2.0 * base) < 1e-14);

  m = al;
  m.fermi_energy *= 3.0;
  CHECK(oracle::rel(validity_min_pairs(m).n_min, 3.0 * base) < 1e-14);

  m = al;
  m.electron_density *= 5.0;
  CHECK(oracle::rel(validity_min_pairs(m).n_min, base / 5.0) < 1e-14);

  // n_s grows as 1/lambda^2, and N_min with it.
  m = al;
  m.london_depth /= 2.0;
  CHECK(oracle::rel(validity_min_pairs(m).n_min, 4.0 * base) < 1e-14);

  m = al;
  m.fermi_energy = m.gap;
  m.electron_density = cooper_pair_density(m);
  CHECK(validity_min_pairs(m).n_min == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("island volume and gate voltage for the worked device") {
  const double volume_um3 = island_volume(aluminum(), 2.5e8) * 1e18;
  CHECK(oracle::rel(volume_um3, 0.005) < 0.10);
  CHECK(volume_um3 == doctest::Approx(0.0045326441610544369).epsilon(1e-12));

  const double c_g = capacitance_per_pair_volt(1e-3);
  CHECK(c_g == doctest::Approx(2.0 * constants::elementary_charge / 1e-3).epsilon(1e-15));
  CHECK(gate_voltage(1e6, c_g) == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(gate_voltage(0.0, c_g) == 0.0);
  CHECK(gate_voltage(1.0, c_g) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK_THROWS_AS(gate_voltage(1.0, 0.0), DomainError);

  const ValidityReport r = validity_report(aluminum(), 2.5e8, 1e6, c_g);
  REQUIRE(r.island_volume);
  REQUIRE(r.gate_voltage);
  CHECK(*r.gate_voltage == doctest::Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("material files") {
  std::istringstream in(R"(# two records
name = aluminum
gap_meV = 0.34
fermi_eV: 11.63
n_e_per_cm3 = 18.06e22   # trailing comment
lambdaL_nm = 16

name = other
GAP_MEV = 1.0
fermi_eV = 5
n_e_per_cm3 = 1e22
lambdaL_nm = 50
)");
  const auto mats = parse_materials(in);
  REQUIRE(mats.size() == 2);
  CHECK(mats[0].name == "aluminum");
  const MaterialProps al = aluminum();
  CHECK(oracle::rel(mats[0].gap, al.gap) < 1e-15);
  CHECK(oracle::rel(mats[0].fermi_energy, al.fermi_energy) < 1e-15);
  CHECK(oracle::rel(mats[0].electron_density, al.electron_density) < 1e-15);
  CHECK(oracle::rel(mats[0].london_depth, al.london_depth) < 1e-15);
  CHECK(mats[1].name == "other");
  CHECK(oracle::rel(mats[1].london_depth, 50e-9) < 1e-15);

  const auto file = load_materials(FINJJ_DATA_DIR "/materials/aluminum.txt");
  REQUIRE(file.size() == 1);
  CHECK(oracle::rel(validity_min_pairs(file[0]).n_min, validity_min_pairs(al).n_min) < 1e-14);

  std::istringstream missing("name = x\ngap_meV = 1\n");
  CHECK_THROWS_AS(parse_materials(missing), DomainError);
  std::istringstream orphan("gap_meV = 1\n");
  CHECK_THROWS_AS(parse_materials(orphan), DomainError);
  std::istringstream junk("name = x\ngap_meV = abc\n");
  CHECK_THROWS_AS(parse_materials(junk), DomainError);
  std::istringstream unknown("name = x\ncolor = 1\n");
  CHECK_THROWS_AS(parse_materials(unknown), DomainError);
  std::istringstream negative("name = x\ngap_meV = -1\nfermi_eV = 1\nn_e_per_cm3 = 1\nlambdaL_nm = 1\n");
  CHECK_THROWS_AS(parse_materials(negative), DomainError);
}

TEST_CASE("built-in presets") {
  CHECK(builtin_material("aluminum").has_value());
  CHECK(builtin_material("Al").has_value());
  CHECK(builtin_material("aluminium").has_value());
  CHECK_FALSE(builtin_material("niobium").has_value());
}

}  // TEST_SUITE
