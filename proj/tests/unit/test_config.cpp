#include <gtest/gtest.h>

#include "config.hpp"

using namespace gaah::cli;

namespace {

std::string error_key(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config_text("");
  EXPECT_EQ(c.model.N, 21);
  EXPECT_EQ(c.model.lambda, 1.0);
  EXPECT_NEAR(c.model.beta, 0.6180339887498949, 1e-16);
  EXPECT_NEAR(c.model.phi, M_PI, 1e-16);
  EXPECT_EQ(c.bath.omega_c, 10.0);
  EXPECT_EQ(c.bath.s, 1.0);
  EXPECT_EQ(c.self_energy.prescription, gaah::bath::ResiduePrescription::Half);
}

TEST(Config, ParsesCommentsAndWhitespace) {
  const RunConfig c = parse_config_text("# header\n\n  model.Delta =  2.5   # inline\nbath.eta=0.5\n");
  EXPECT_EQ(c.model.Delta, 2.5);
  EXPECT_EQ(c.bath.eta, 0.5);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(error_key("model.a = 1.2"), "model.a");
  EXPECT_EQ(error_key("grid.dt = 0"), "grid.dt");
  EXPECT_EQ(error_key("grid.dt = -0.1"), "grid.dt");
  EXPECT_EQ(error_key("model.N = seven"), "model.N");
  EXPECT_EQ(error_key("model.N = 2.5"), "model.N");
  EXPECT_EQ(error_key("bath.eta = -1"), "bath.eta");
  EXPECT_EQ(error_key("bath.prescription = quarter"), "bath.prescription");
  EXPECT_EQ(error_key("model.colour = red"), "model.colour");
  EXPECT_EQ(error_key("dynamics.markovian = yes"), "dynamics.markovian");
  EXPECT_EQ(error_key("dynamics.init = site\ndynamics.init_site = 30"), "dynamics.init_site");
  EXPECT_EQ(error_key("grid.dt = 0.03\ngrid.t_max = 1"), "grid.t_max");
  EXPECT_EQ(error_key("sweep.param = figdata.bundle"), "sweep.param");
  EXPECT_EQ(error_key("model.Delta"), "");
}

TEST(Config, MessageIsDescriptive) {
  try {
    parse_config_text("model.a = 1.2");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.a"), std::string::npos);
  }
}

TEST(Config, SerializeRoundTrip) {
  const RunConfig c = parse_config_text(
      "model.a = 0.5\nmodel.Delta = 0.76\nmodel.beta = 0.1234567890123\nbath.eta = 0.5\n"
      "bath.evaluation = real_axis\npoles.re_min = 2.5\ndynamics.band_limit = 80\n"
      "sweep.param = model.Delta\nsweep.values = 1, 2.5, 6\noutput.svg = true\n");
  const std::string text = serialize(c);
  const RunConfig back = parse_config_text(text);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(back.sweep.values, (std::vector<double>{1.0, 2.5, 6.0}));
  EXPECT_EQ(*back.poles.re_min, 2.5);
  EXPECT_FALSE(back.poles.re_max.has_value());
}

TEST(Config, HelpListsExactlyTheAcceptedKeys) {
  const std::string help = describe_keys();
  const RunConfig defaults;
  for (const auto& k : key_registry()) {
    EXPECT_NE(help.find("  " + k.name + " ["), std::string::npos) << k.name;
    RunConfig c;
    EXPECT_NO_THROW(apply(c, k.name, k.get(defaults))) << k.name;
  }
  // Every serialized line is a registry key, and vice versa.
  std::size_t lines = 0;
  for (char ch : serialize(defaults)) lines += ch == '\n';
  EXPECT_EQ(lines, key_registry().size());
}

TEST(Config, PoleOptionsRegion) {
  RunConfig c = parse_config_text("model.Delta = 2.5\npoles.re_min = 2.8\npoles.re_max = 3.0");
  const auto o = c.pole_options();
  ASSERT_TRUE(o.region.has_value());
  EXPECT_EQ(o.region->re_min, 2.8);
  EXPECT_EQ(o.region->re_max, 3.0);
  EXPECT_EQ(o.region->im_max, 0.0);
  EXPECT_FALSE(parse_config_text("").pole_options().region.has_value());
}
