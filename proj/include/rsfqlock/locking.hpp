/*!
  \file locking.hpp
  \brief Key-based locking transforms for pipelined netlists

  All transforms take a (possibly unbalanced) combinational host netlist and
  return a locked, pipelined netlist.  Key bit i drives key input i; the
  comparator-based schemes compare key bit i against compare input i.
*/

#pragma once

#include "bit_vector.hpp"
#include "netlist.hpp"
#include "pipeline.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsfqlock
{

enum class scheme
{
  ll,
  sarlock,
  rsat,
  csar
};

/*! \brief "LL", "SARLock", "RSAT" or "CSAR". */
std::string_view scheme_name( scheme s );

/*! \brief Case-insensitive; also accepts "C-SAR" and "XOR". */
scheme scheme_from_name( std::string_view name );

struct csar_timing
{
  unsigned T = 6; /* X-path budget: MUX 2, key check 1, OR 1, DFF 1, AND 1 */
  unsigned N = 0;
  unsigned N_s0 = 0;
  unsigned N_s1 = 0;
};

/*! \brief Timing for a host of latency `host_latency`; hosts shallower than T are padded to T. */
csar_timing compute_csar_timing( unsigned host_latency, unsigned n_c );

struct locked_netlist
{
  netlist ntk;
  scheme kind = scheme::ll;
  bit_vector correct_key;
  unsigned n_key = 0;
  unsigned n_c = 0;
  uint64_t seed = 0;
  std::size_t flip_output = 0;
  std::vector<std::size_t> compare_inputs;
  std::optional<csar_timing> timing;

  /*! \brief Named internal nets of the lock circuitry (e.g. "flip", "X", "Ybar", "G2", "G3", "mux"). */
  std::map<std::string, net_id> landmarks;
};

struct lock_options
{
  std::size_t flip_output = 0;

  /*! \brief Primary-input indices compared against the key; empty means the first n_key inputs. */
  std::vector<std::size_t> compare_inputs;
};

/*! \brief Uniformly random key of the given width. */
bit_vector random_key( unsigned n_key, uint64_t seed );

/*!
  \brief XOR/XNOR key-gate insertion on `n_key` randomly chosen logic nets

  Key bit i is drawn from the same generator; a 0 bit yields an XOR key gate,
  a 1 bit an XNOR key gate.  The result is path-balanced.
*/
locked_netlist lock_ll( netlist const& ntk, unsigned n_key, uint64_t seed );

/*!
  \brief One-point flip: output `flip_output` is inverted iff the compared input
  prefix equals the applied key and the applied key is not the correct one
*/
locked_netlist lock_sarlock( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, lock_options const& opts = {} );
locked_netlist lock_sarlock( netlist const& ntk, unsigned n_key, uint64_t seed, lock_options const& opts = {} );

/*!
  \brief Mismatch detector X gated by the inverted comparator, M = Ybar & X, XORed into the flip output
*/
locked_netlist lock_rsat( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, lock_options const& opts = {} );

/*!
  \brief RSAT with a temporal guard of `n_c` camouflaged DFFs

  The flip only fires after the compared prefix has matched the wrong key for
  n_c + 1 consecutive cycles, and it reaches the output n_c cycles after the
  nominal latency.  The lock circuitry is deliberately left unbalanced at G2,
  G3 and the MUX; primary outputs of the activated chip share latency N + 1.
*/
locked_netlist lock_csar( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, unsigned n_c,
                          lock_options const& opts = {} );

struct overhead_report
{
  area_report baseline;
  area_report locked;
  std::map<gate_kind, long long> delta_counts;
  long long delta_total = 0;
  double delta_jj = 0.0;
};

overhead_report overhead( netlist const& baseline, netlist const& locked, jj_cost_table const& costs = default_jj_costs() );

/*! \brief Sidecar record {scheme, n_key, n_c, seed, correct_key, flip_output, compare_inputs, T, N, N_s0, N_s1}. */
std::string sidecar_to_json( locked_netlist const& locked );

/*! \brief Rebuilds the lock metadata for `ntk` from a sidecar record. */
locked_netlist locked_from_sidecar( netlist ntk, std::string const& json_text );

} // namespace rsfqlock
