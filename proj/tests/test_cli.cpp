#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "photodetach");
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = photodetach::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("photodetach_cli_" + name);
}

}  // namespace

TEST_CASE("sigma prints one row under a header") {
  const auto r = run({"sigma", "--eph-ev", "1", "--k", "1", "--mu", "2", "--d-bohr", "100"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "E_ph_eV,E_au,u,sigma0_au,sigma1_au,sigma2_au,sigma_total_au,A");
  CHECK(rows[1].rfind("1.00000000000e+00,", 0) == 0);

  const auto by_energy = run({"sigma", "--e-au", "0.009032"});
  CHECK(by_energy.code == 0);
}

TEST_CASE("modulation") {
  const auto r = run({"modulation", "--u", "0", "--k", "0.5", "--mu", "1"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "u,A1,A");
  CHECK(run({"modulation"}).code == 2);
}

TEST_CASE("exit codes") {
  CHECK(run({"sigma", "--eph-ev", "0.5"}).code == 1);
  CHECK(run({"sigma", "--eph-ev", "1", "--k", "3"}).code == 2);
  CHECK(run({"sigma", "--eph-ev", "1", "--e-au", "0.1"}).code == 2);
  CHECK(run({"sigma", "--no-such-flag"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"sweep", "--variable", "theta"}).code == 2);
  CHECK(run({"sweep", "--outputs", "j_z"}).code == 2);
  CHECK(run({"modulation", "--u", "-1"}).code == 2);
  CHECK(run({"sweep", "--preset", "fig2", "--output", "/nonexistent/dir/out.csv"}).code == 1);
  const auto below = run({"sigma", "--eph-ev", "0.5"});
  CHECK(below.err.find("below detachment threshold") != std::string::npos);
}

TEST_CASE("help lists units and defaults") {
  const auto r = run({"sigma", "--help"});
  CHECK(r.code == 0);
  const std::string text = r.out + r.err;
  CHECK(text.find("[bohr]") != std::string::npos);
  CHECK(text.find("[eV]") != std::string::npos);
  CHECK(text.find("[0.7542]") != std::string::npos);
  CHECK(text.find("[100]") != std::string::npos);
}

TEST_CASE("small-d warning") {
  const auto r = run({"sigma", "--eph-ev", "1", "--d-bohr", "20"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("config file with command-line override") {
  const auto path = temp_file("sigma.conf");
  {
    std::ofstream conf(path);
    conf << "eph-ev = 1.2\nk = 0.5\nmu = 1.5\n";
  }
  const auto from_file = run({"sigma", "--config", path.string()});
  const auto explicit_flags = run({"sigma", "--eph-ev", "1.2", "--k", "0.5", "--mu", "1.5"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == explicit_flags.out);
  const auto overridden = run({"sigma", "--config", path.string(), "--k", "0.7"});
  const auto expected = run({"sigma", "--eph-ev", "1.2", "--k", "0.7", "--mu", "1.5"});
  CHECK(overridden.out == expected.out);
  {
    std::ofstream conf(path);
    conf << "not-a-flag = 3\n";
  }
  CHECK(run({"sigma", "--config", path.string(), "--eph-ev", "1"}).code == 2);
  {
    std::ofstream conf(path);
    conf << "# fig2 subset\nvariable = u\ncount = 4\nk = [0.5, 1]\nmu = 1 2\n";
  }
  const auto listed = run({"sweep", "--config", path.string()});
  CHECK(listed.code == 0);
  CHECK(lines(listed.out).front() == "u,A_K0.5_mu1,A_K0.5_mu2,A_K1_mu1,A_K1_mu2");
  CHECK(run({"sigma", "--config", "/nonexistent/x.conf"}).code == 2);
  std::filesystem::remove(path);
}

TEST_CASE("sweep output") {
  const auto r = run({"sweep", "--variable", "u", "--start", "1", "--stop", "2", "--count", "3", "--k",
                      "0.5", "--mu", "1", "--outputs", "A"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "u,A");

  const auto fig2 = run({"sweep", "--preset", "fig2", "--threads", "1"});
  const auto fig2_threads = run({"sweep", "--preset", "fig2", "--threads", "4"});
  CHECK(fig2.out == fig2_threads.out);
  CHECK(lines(fig2.out).size() == 2001);
}

TEST_CASE("flux-screen") {
  const auto r = run({"flux-screen", "--rho-stop", "100", "--count", "5"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 6);
  const auto count = run({"flux-screen", "--k", "1", "--mu", "2", "--fringe-count"});
  CHECK(count.out == "fringes = 5\n");
  const auto preset = run({"flux-screen", "--preset", "fig4", "--fringe-count"});
  CHECK(lines(preset.out).size() == 6);
}

TEST_CASE("validate") {
  const auto r = run({"validate", "--grid", "small"});
  CHECK(r.code == 0);
  CHECK(r.err.find("32/32 oracle checks passed") != std::string::npos);
  CHECK(lines(r.out).size() == 33);
  // An impossible tolerance fails honestly.
  CHECK(run({"validate", "--grid", "small", "--tol", "1e-30"}).code == 3);
}

TEST_CASE("synth piped into fit") {
  const auto synth = run({"synth", "--k", "0.7", "--mu", "1.5", "--d-bohr", "100"});
  REQUIRE(synth.code == 0);
  CHECK(lines(synth.out).front() == "E_ph_eV,sigma_au");
  const auto fit = run({"fit"}, synth.out);
  REQUIRE(fit.code == 0);
  CHECK(fit.out.find("K_hat = 7.0000") != std::string::npos);
  CHECK(fit.out.find("mu_hat = 1.5000") != std::string::npos);
  CHECK(fit.out.find("unidentifiable = false") != std::string::npos);

  const auto csv = temp_file("fit.csv");
  CHECK(run({"fit", "--csv", csv.string()}, synth.out).code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("K_hat,", 0) == 0);
  std::filesystem::remove(csv);

  CHECK(run({"fit"}, "E_ph_eV,sigma_au\n1,2\n").code == 1);
  CHECK(run({"fit", "--input", "/nonexistent/spectrum.csv"}).code == 1);

  const auto noisy_a = run({"synth", "--noise", "0.01", "--seed", "9"});
  const auto noisy_b = run({"synth", "--noise", "0.01", "--seed", "9"});
  CHECK(noisy_a.out == noisy_b.out);
}
