/*!
  \file harness.hpp
  \brief Experiment grids: config loading, per-cell runs, CSV tables and audit

  A config is one JSON document:

    {
      "output_dir": "out",              // relative to the config file
      "seed": 2024,
      "jj_costs": "costs.json",         // optional, default table otherwise
      "tables": [ {
        "id": "T3",                     // T2 | T3 | T4 | AREA
        "benchmarks": [ "../benchmarks/c499.bench" ],
        "rows": [ {
          "label": "C-SAR",
          "scheme": "CSAR",             // LL | SARLock | RSAT | CSAR
          "n_key": [5, 6, 7],
          "n_c": [1],                   // CSAR only
          "attack": "sweep",            // sweep | miter | none
          "mode": "exhaustive",         // random | exhaustive (sweep)
          "hold": "ssat",               // cycles per pattern, or "ssat" for n_c + 1
          "rounds": 1,
          "metric": "n_clk"             // n_clk | gates | jj
        } ]
      } ]
    }

  Every cell uses the seed derived from (seed, round) for both locking and
  the attack, so rows of one round share their random choices.
*/

#pragma once

#include "attack.hpp"
#include "locking.hpp"
#include "netlist.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rsfqlock
{

struct row_spec
{
  std::string label;
  scheme kind = scheme::csar;
  std::vector<unsigned> n_key;
  std::vector<unsigned> n_c{ 0 };
  std::string attack = "sweep";
  sweep_mode mode = sweep_mode::exhaustive;
  unsigned hold = 1;
  bool ssat_hold = false; /* hold = n_c + 1 */
  unsigned rounds = 1;
  std::string metric = "n_clk";
};

struct table_spec
{
  std::string id;
  std::vector<std::filesystem::path> benchmarks;
  std::vector<row_spec> rows;
};

struct experiment_config
{
  std::filesystem::path output_dir;
  uint64_t seed = 0;
  jj_cost_table costs = default_jj_costs();
  std::vector<table_spec> tables;
};

/*! \brief Parses and validates; relative paths resolve against `base_dir`.  Throws `config_error`. */
experiment_config parse_config( std::string const& text, std::filesystem::path const& base_dir );
experiment_config load_config( std::filesystem::path const& path );

struct config_overrides
{
  std::optional<std::filesystem::path> output_dir;
  std::optional<uint64_t> seed;
  std::optional<sweep_mode> mode;
  std::optional<unsigned> hold;
};

void apply_overrides( experiment_config& cfg, config_overrides const& o );

struct cell_id
{
  std::string table;
  std::string benchmark;
  std::string label;
  unsigned n_key = 0;
  unsigned n_c = 0;
  unsigned round = 0;

  /*! \brief `<table>__<bench>__<label>__k<n>__c<nc>__r<round>.report.json` */
  std::string report_name() const;
};

struct cell_result
{
  cell_id id;
  std::string value; /* n_clk or area metric; "x" for a failed attack; "error" if a stage threw */
  std::string error;
};

/*! \brief One cell: parse, balance, lock, attack or measure; writes the report when `out_dir` is non-empty. */
cell_result run_cell( experiment_config const& cfg, table_spec const& table, std::filesystem::path const& bench,
                      row_spec const& row, unsigned n_key, unsigned n_c, unsigned round,
                      std::filesystem::path const& out_dir );

/*! \brief Cell value as stored in a report file. */
std::string cell_value_from_report( std::string const& report_json, std::string const& metric );

/*! \brief CSV for one table from its cell results (in any order); throws `error` on a missing cell. */
std::string emit_table( table_spec const& table, std::vector<cell_result> const& cells );

struct run_summary
{
  std::vector<std::filesystem::path> csv_files;
  std::vector<cell_result> cells;
  std::size_t failed_cells = 0; /* cells whose stage threw */
};

/*! \brief Runs the full grid on `jobs` threads, writes reports and `<id>.csv` per table. */
run_summary run_experiment( experiment_config const& cfg, unsigned jobs = 1 );

/*!
  \brief Rebuilds every table from the reports on disk and compares with the CSVs

  Also re-counts n_clk from each sweep trace.  Returns one message per problem.
*/
std::vector<std::string> audit( experiment_config const& cfg );

} // namespace rsfqlock
