/*!
  \file attack.hpp
  \brief Oracle model, miter-based SAT attack and the cycle-counting sweep attack

  Cycle accounting counts applied pattern cycles only.  The constant pipeline
  fill of L cycles needed to observe the last pattern is not charged.
*/

#pragma once

#include "bit_vector.hpp"
#include "locking.hpp"
#include "pipeline.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsfqlock
{

/*!
  \brief Clocked simulation that reports outputs aligned with the stimulus cycle that caused them

  Lanes carry fixed key values.  After applying a pattern the engine looks L
  cycles ahead on a snapshot, so the outputs belonging to the applied cycles
  are available immediately; the lookahead is rolled back afterwards.
*/
class pipelined_probe
{
public:
  using word = uint64_t;

  /*! \brief `key_words` is port-major: key bit i of lane l is bit l%64 of `key_words[i * words + l/64]`. */
  pipelined_probe( netlist const& ntk, unsigned latency, std::vector<word> key_words, std::size_t words );

  /*! \brief Applies `pattern` for `hold` cycles; result[j][o * words + w] is output o for applied cycle j. */
  std::vector<std::vector<word>> apply( bit_vector const& pattern, unsigned hold );

  unsigned latency() const noexcept { return latency_; }
  std::size_t words() const noexcept { return words_; }
  std::size_t num_outputs() const noexcept { return sim_.num_outputs(); }
  void reset() { sim_.reset(); }

private:
  clocked_simulator sim_;
  unsigned latency_;
  std::vector<word> keys_;
  std::size_t words_;
};

/*!
  \brief The activated chip: the locked netlist running the correct key

  L is the output latency of the activated netlist, i.e. with the key bound to
  constants and folded.  Queries reveal outputs only.
*/
class oracle
{
public:
  explicit oracle( locked_netlist const& locked );

  /*! \brief Applies the pattern for `hold` cycles and returns the aligned output per cycle; n_clk grows by `hold`. */
  std::vector<bit_vector> query( bit_vector const& pattern, unsigned hold = 1 );

  unsigned latency() const noexcept { return probe_.latency(); }
  uint64_t n_clk() const noexcept { return n_clk_; }
  std::size_t num_inputs() const noexcept { return num_inputs_; }
  std::size_t num_outputs() const noexcept { return probe_.num_outputs(); }

  /*! \brief Back to the reset state with n_clk = 0. */
  void reset();

private:
  pipelined_probe probe_;
  std::size_t num_inputs_;
  uint64_t n_clk_ = 0;
};

enum class attack_status
{
  key_recovered,
  failed,
  budget_exhausted
};

/*! \brief "KeyRecovered", "Failed" or "BudgetExhausted". */
std::string_view status_name( attack_status s );
attack_status status_from_name( std::string_view name );

struct trace_entry
{
  bit_vector pattern;
  unsigned hold = 1;
  std::vector<bit_vector> eliminated;
  bool drain = false;
};

struct attack_report
{
  std::string scheme;
  unsigned n_key = 0;
  unsigned n_c = 0;
  std::string mode; /* "miter", "random" or "exhaustive" */
  unsigned hold = 1;
  uint64_t seed = 0;
  attack_status status = attack_status::failed;
  std::vector<bit_vector> recovered_keys;
  uint64_t iterations = 0;
  uint64_t n_clk = 0;
  std::vector<trace_entry> trace;

  std::optional<bit_vector> recovered_key() const
  {
    return recovered_keys.empty() ? std::nullopt : std::optional<bit_vector>( recovered_keys.front() );
  }

  /*! \brief Total eliminated candidates over the trace. */
  std::size_t eliminated_count() const;

  /*! \brief Sum of the holds in the trace. */
  uint64_t traced_cycles() const;
};

std::string report_to_json( attack_report const& r );
attack_report report_from_json( std::string const& text );

struct miter_options
{
  uint64_t budget = 10000; /* maximum DIP iterations */

  /*! \brief DIPs to try first, in order; each is used only if it still distinguishes two keys. */
  std::vector<bit_vector> scripted_dips;

  /*! \brief Record per-iteration eliminated keys (only for n_key <= 16). */
  bool record_eliminations = true;
};

/*!
  \brief Oracle-guided SAT attack on the combinational abstraction

  Each iteration finds a distinguishing input, queries the oracle for one
  cycle and constrains both key copies to reproduce the observation.  When
  no distinguishing input remains, any key consistent with all observations
  is returned.
*/
attack_report miter_sat_attack( locked_netlist const& locked, oracle& o, miter_options const& opts = {} );

enum class sweep_mode
{
  random,
  exhaustive
};

std::string_view mode_name( sweep_mode m );
sweep_mode mode_from_name( std::string_view name );

struct sweep_options
{
  sweep_mode mode = sweep_mode::exhaustive;
  unsigned hold = 1;
  uint64_t seed = 0;

  /*! \brief Maximum number of patterns; unset means the full pattern space. */
  std::optional<uint64_t> budget;

  /*! \brief Cycles observed after the last pattern; unset means n_c of the locked netlist. */
  std::optional<unsigned> drain;

  /*! \brief Inputs driven by the sweep; unset means the compared inputs (all inputs for LL). */
  std::optional<std::vector<std::size_t>> probe_inputs;
};

inline constexpr unsigned max_sweep_key_bits = 24;

/*!
  \brief Cycle-counting attack over an explicit bank of all 2^n_key candidate keys

  Every candidate runs in its own simulation lane next to the oracle;
  candidates whose aligned output differs from the oracle on any applied
  cycle are eliminated.  Drain cycles drive the complement of the last
  pattern so that they cannot extend its hold.
*/
attack_report sweep_attack( locked_netlist const& locked, oracle& o, sweep_options const& opts );

} // namespace rsfqlock
