#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "haad/checkpoint.hpp"
#include "haad/diffusion.hpp"
#include "haad/encoder.hpp"
#include "haad/errors.hpp"
#include "haad/random.hpp"

using namespace haad;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "haad_test_checkpoint";
  fs::create_directories(dir);
  return dir / name;
}

Checkpoint sample_checkpoint() {
  Rng rng(1);
  Checkpoint ck;
  ck.header = {{"kind", "test"}, {"note", "x"}};
  ck.tensors.push_back({"a", standard_normal(3, 4, rng)});
  ck.tensors.push_back({"b", standard_normal(1, 7, rng)});
  ck.tensors.push_back({"empty", Eigen::MatrixXd(0, 5)});
  return ck;
}

}  // namespace

TEST_CASE("write then read reproduces header and tensors at single precision") {
  const auto path = scratch("roundtrip.ckpt");
  const auto ck = sample_checkpoint();
  write_checkpoint(path, ck);
  const auto back = read_checkpoint(path);
  CHECK(back.header["kind"] == "test");
  CHECK(back.header["note"] == "x");
  REQUIRE(back.tensors.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.tensors[i].name == ck.tensors[i].name);
    CHECK(back.tensors[i].value.rows() == ck.tensors[i].value.rows());
    CHECK(back.tensors[i].value.cols() == ck.tensors[i].value.cols());
    CHECK(back.tensors[i].value == ck.tensors[i].value.cast<float>().cast<double>());
  }
  // Stored row-major: the second float of the payload is a(0, 1).
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  float first[2];
  in.read(reinterpret_cast<char*>(first), sizeof(first));
  CHECK(first[1] == static_cast<float>(ck.tensors[0].value(0, 1)));
}

TEST_CASE("rewriting a read checkpoint is byte-identical") {
  const auto a = scratch("first.ckpt");
  const auto b = scratch("second.ckpt");
  write_checkpoint(a, sample_checkpoint());
  write_checkpoint(b, read_checkpoint(a));
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
}

TEST_CASE("corrupt checkpoints") {
  const auto path = scratch("corrupt.ckpt");
  write_checkpoint(path, sample_checkpoint());
  const auto size = fs::file_size(path);

  SUBCASE("truncated payload") {
    fs::resize_file(path, size - 4);
    CHECK_THROWS_AS(read_checkpoint(path), ParseError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream(path, std::ios::binary | std::ios::app) << "zz";
    CHECK_THROWS_AS(read_checkpoint(path), ParseError);
  }
  SUBCASE("garbage header") {
    std::ofstream(path, std::ios::binary) << "not json\n";
    CHECK_THROWS_AS(read_checkpoint(path), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_checkpoint(scratch("nope.ckpt")), IoError);
  }
}

TEST_CASE("missing tensors and wrong kinds are compatibility errors") {
  const auto ck = sample_checkpoint();
  CHECK_THROWS_AS(ck.tensor("zzz"), CompatibilityError);
  CHECK_THROWS_AS(encoder_from_checkpoint(ck), CompatibilityError);
  CHECK_THROWS_AS(diffusion_from_checkpoint(ck), CompatibilityError);

  EncoderConfig c;
  c.joints = 3;
  c.hidden_dim = 4;
  auto enc = encoder_to_checkpoint(init_params(c, 1));
  enc.tensors.pop_back();
  CHECK_THROWS_AS(encoder_from_checkpoint(enc), CompatibilityError);
}

TEST_CASE("encoder survives a file round trip") {
  EncoderConfig c;
  c.joints = 5;
  c.hidden_dim = 6;
  c.blocks = 2;
  const auto p = init_params(c, 4);
  const auto path = scratch("encoder.ckpt");
  write_checkpoint(path, encoder_to_checkpoint(p, {{"frame_length", 60}}));
  const auto back = encoder_from_checkpoint(read_checkpoint(path));
  CHECK(back.config.blocks == 2);
  CHECK(back.config.hidden_dim == 6);
  Rng rng(2);
  const Eigen::MatrixXd coeffs = standard_normal(10, 15, rng);
  // Single-precision storage keeps embeddings close to the originals.
  CHECK((forward(back, coeffs) - forward(p, coeffs)).cwiseAbs().maxCoeff() < 1e-5);
}
