#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "doctest.h"

#include "symclust/ingest.hpp"

using namespace symclust;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("symclust-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kEssStyleSchema = R"({
  "weight_scheme": "per-variable-n",
  "variables": [
    {"name": "gender", "kind": "categorical", "categories": ["M", "F"], "alpha": 1.0},
    {"name": "birth_year", "kind": "numeric-binned",
     "categories": ["0-19", "20-34", "35-64", "65plus", "NA"],
     "breaks": [20, 35, 65], "na_category": true, "alpha": 1.0},
    {"name": "country", "kind": "categorical", "categories": ["BE", "SI", "UA"],
     "alpha": 0.0, "per_unit": true}
  ]
})";

}  // namespace

TEST_CASE("schema round trip and validation") {
    TempDir dir;
    write(dir.file("schema.json"), kEssStyleSchema);
    const Schema s = load_schema(dir.file("schema.json"));
    REQUIRE(s.size() == 3);
    CHECK(s.variables[1].arity() == 5);
    CHECK(s.variables[1].na_category);
    CHECK(s.variables[2].per_unit);
    CHECK(s.variables[2].alpha == 0.0);

    save_schema(s, dir.file("copy.json"));
    const Schema again = load_schema(dir.file("copy.json"));
    CHECK(again.variables[1].breaks == s.variables[1].breaks);
    CHECK(again.weight_scheme == s.weight_scheme);
}

TEST_CASE("schema errors: duplicates, empty list, bad breaks") {
    TempDir dir;
    write(dir.file("dup.json"),
          R"({"variables": [{"name": "v", "categories": ["a", "a"]}]})");
    CHECK_THROWS_AS(load_schema(dir.file("dup.json")), std::runtime_error);

    write(dir.file("empty.json"), R"({"variables": []})");
    CHECK_THROWS_AS(load_schema(dir.file("empty.json")), std::runtime_error);

    write(dir.file("breaks.json"),
          R"({"variables": [{"name": "v", "kind": "numeric-binned",
              "categories": ["a", "b", "c"], "breaks": [9, 3]}]})");
    CHECK_THROWS_AS(load_schema(dir.file("breaks.json")), std::runtime_error);
}

TEST_CASE("categorize: half-open bins with an NA bucket") {
    VariableSpec v;
    v.name = "birth_year";
    v.kind = VariableKind::numeric_binned;
    v.categories = {"0-19", "20-34", "35-64", "65plus", "NA"};
    v.breaks = {20, 35, 65};
    v.na_category = true;

    CHECK(categorize(19.0, v) == 0);
    CHECK(categorize(20.0, v) == 1);
    CHECK(categorize(34.999, v) == 1);
    CHECK(categorize(35.0, v) == 2);
    CHECK(categorize(64.0, v) == 2);
    CHECK(categorize(65.0, v) == 3);
    CHECK(categorize(101.0, v) == 3);
    CHECK(categorize(std::nullopt, v) == 4);

    v.na_category = false;
    v.categories.pop_back();
    CHECK_THROWS_AS(categorize(std::nullopt, v), std::domain_error);
}

TEST_CASE("aggregate_unit counts rows and applies the unit weight") {
    TempDir dir;
    write(dir.file("schema.json"), kEssStyleSchema);
    const Schema s = load_schema(dir.file("schema.json"));

    std::vector<MemberRow> rows(3);
    rows[0].values = {"M", "1971", "SI"};
    rows[1].values = {"M", "1980", "SI"};
    rows[2].values = {"F", "NA", "SI"};

    const SymbolicObject x = aggregate_unit("hh1", rows, s, 1.0);
    CHECK(x.freq[0] == std::vector<double>{2.0, 1.0});
    CHECK(x.prob[0][0] == doctest::Approx(2.0 / 3.0));
    CHECK(x.prob[0][1] == doctest::Approx(1.0 / 3.0));
    CHECK(x.weight[0] == std::vector<double>{3.0, 3.0});
    // birth years 1971/1980 land past every break; one NA
    CHECK(x.freq[1] == std::vector<double>{0.0, 0.0, 0.0, 2.0, 1.0});
    // country counted once per unit, f sums to the unit weight
    CHECK(x.freq[2] == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(x.count[2] == 1.0);

    const SymbolicObject y = aggregate_unit("hh2", rows, s, 2.0);
    CHECK(y.freq[0] == std::vector<double>{4.0, 2.0});
    CHECK(y.prob[0][0] == doctest::Approx(x.prob[0][0]));  // p is weight-invariant
    CHECK(y.weight[0] == std::vector<double>{6.0, 6.0});
    CHECK(y.freq[2] == std::vector<double>{0.0, 2.0, 0.0});

    CHECK_THROWS_AS(aggregate_unit("bad", rows, s, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_unit("none", std::vector<MemberRow>{}, s, 1.0),
                    std::invalid_argument);
}

TEST_CASE("micro-data reading groups rows by unit") {
    TempDir dir;
    write(dir.file("schema.json"), kEssStyleSchema);
    const Schema s = load_schema(dir.file("schema.json"));
    write(dir.file("rows.csv"),
          "hh,gender,birth_year,country,dweight\n"
          "h1,M,1971,SI,1.5\n"
          "h1,F,1975,SI,1.5\n"
          "h2,F,2001,BE,0.5\n"
          "h1,M,NA,SI,1.5\n");
    const auto units = read_microdata(dir.file("rows.csv"), s,
                                      std::optional<std::string>("dweight"));
    REQUIRE(units.size() == 2);
    CHECK(units[0].id == "h1");
    CHECK(units[0].freq[0] == std::vector<double>{3.0, 1.5});
    CHECK(units[0].count[0] == doctest::Approx(4.5));
    CHECK(units[1].freq[0] == std::vector<double>{0.0, 0.5});

    // inconsistent per-unit weights are rejected
    write(dir.file("bad.csv"),
          "hh,gender,birth_year,country,dweight\n"
          "h1,M,1971,SI,1.5\n"
          "h1,F,1975,SI,2.5\n");
    CHECK_THROWS_AS(read_microdata(dir.file("bad.csv"), s,
                                   std::optional<std::string>("dweight")),
                    std::runtime_error);

    // unknown category label is rejected
    write(dir.file("badcat.csv"),
          "hh,gender,birth_year,country\n"
          "h1,X,1971,SI\n");
    CHECK_THROWS_AS(read_microdata(dir.file("badcat.csv"), s, std::nullopt),
                    std::domain_error);
}

TEST_CASE("custom-column weights multiply the unit weight") {
    TempDir dir;
    write(dir.file("schema.json"), R"({
      "weight_scheme": "custom-column",
      "variables": [
        {"name": "age", "kind": "categorical", "categories": ["young", "old"],
         "weight_column": "men"}
      ]
    })");
    const Schema s = load_schema(dir.file("schema.json"));
    write(dir.file("rows.csv"),
          "id,age,men,w\n"
          "c1,young,120,2\n"
          "c1,old,120,2\n");
    const auto units = read_microdata(dir.file("rows.csv"), s,
                                      std::optional<std::string>("w"));
    REQUIRE(units.size() == 1);
    CHECK(units[0].weight[0] == std::vector<double>{240.0, 240.0});
    CHECK(units[0].freq[0] == std::vector<double>{2.0, 2.0});
}

TEST_CASE("units serialize with full precision and reload bit-exact") {
    TempDir dir;
    write(dir.file("schema.json"), kEssStyleSchema);
    const Schema s = load_schema(dir.file("schema.json"));
    write(dir.file("rows.csv"),
          "hh,gender,birth_year,country,dweight\n"
          "h1,M,1971,SI,1.37\n"
          "h1,F,1975,SI,1.37\n"
          "h2,F,2001,BE,0.613\n");
    const auto units = read_microdata(dir.file("rows.csv"), s,
                                      std::optional<std::string>("dweight"));

    save_units(units, dir.file("units.jsonl"));
    const auto reloaded = load_units(dir.file("units.jsonl"), &s);
    REQUIRE(reloaded.size() == units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        CHECK(reloaded[u].id == units[u].id);
        CHECK(reloaded[u].freq == units[u].freq);
        CHECK(reloaded[u].weight == units[u].weight);
        CHECK(reloaded[u].count == units[u].count);
        CHECK(reloaded[u].prob == units[u].prob);
    }
    save_units(reloaded, dir.file("units2.jsonl"));
    CHECK(slurp(dir.file("units.jsonl")) == slurp(dir.file("units2.jsonl")));
}

TEST_CASE("synthetic generation is seeded and respects the profile") {
    TempDir dir;
    write(dir.file("profile.json"), R"({
      "variables": [{"name": "V1", "categories": ["a", "b", "c", "d"]}],
      "rows_per_unit": [5, 9],
      "groups": [
        {"name": "g0", "units": 7, "probs": [[0.5, 0.5, 0.0, 0.0]]},
        {"name": "g1", "units": 5, "probs": [[0.0, 0.0, 0.5, 0.5]]}
      ]
    })");
    const SyntheticProfile profile = load_profile(dir.file("profile.json"));
    const SyntheticData a = generate_synthetic(profile, 99);
    const SyntheticData b = generate_synthetic(profile, 99);
    REQUIRE(a.units.size() == 12);
    CHECK(a.labels == b.labels);
    for (std::size_t u = 0; u < a.units.size(); ++u) {
        CHECK(a.units[u].freq == b.units[u].freq);
        // disjoint supports: group 0 only uses categories a/b
        if (a.labels[u] == 0) {
            CHECK(a.units[u].freq[0][2] == 0.0);
            CHECK(a.units[u].freq[0][3] == 0.0);
        } else {
            CHECK(a.units[u].freq[0][0] == 0.0);
            CHECK(a.units[u].freq[0][1] == 0.0);
        }
        double rows = a.units[u].count[0];
        CHECK(rows >= 5.0);
        CHECK(rows <= 9.0);
    }
    const SyntheticData c = generate_synthetic(profile, 100);
    bool identical = true;
    for (std::size_t u = 0; u < a.units.size(); ++u)
        if (a.units[u].freq != c.units[u].freq) identical = false;
    CHECK_FALSE(identical);

    write(dir.file("bad.json"), R"({
      "variables": [{"name": "V1", "categories": ["a", "b"]}],
      "groups": [{"name": "g0", "units": 3, "probs": [[0.7, 0.7]]}]
    })");
    CHECK_THROWS_AS(load_profile(dir.file("bad.json")), std::invalid_argument);
}
