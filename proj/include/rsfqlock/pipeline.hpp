/*!
  \file pipeline.hpp
  \brief Gate-level pipelining: sequential depth, path balancing, clocked simulation

  Clocked RSFQ cells latch on every clock pulse, so a combinational netlist
  becomes a pipeline in which each clocked gate adds a fixed number of cycles.
  Unclocked cells (JTL/BUF, camouflaged DFF) pass values through within the
  cycle.  All registers start at 0, the no-pulse rest state.
*/

#pragma once

#include "bit_vector.hpp"
#include "netlist.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rsfqlock
{

struct latency_model
{
  std::array<unsigned, num_gate_kinds> cycles{};

  unsigned operator()( gate_kind kind ) const { return cycles[static_cast<std::size_t>( kind )]; }

  /*! \brief Logic gates and DFF 1 cycle, MUX2 2 cycles, BUF/CDFF/constants/ports 0. */
  static latency_model rsfq();
};

/*! \brief depth[net] in clock cycles from the primary/key inputs. */
using depth_map = std::vector<unsigned>;

depth_map sequential_depths( netlist const& ntk, latency_model const& model = latency_model::rsfq() );

/*! \brief Clocked gates whose fanins arrive at different depths. */
std::vector<net_id> unbalanced_gates( netlist const& ntk, latency_model const& model = latency_model::rsfq() );

/*!
  \brief Inserts DFF chains so every clocked gate sees equal fanin depths and all
  outputs share the maximum output depth

  Original gates keep their ids; inserted DFFs are appended and shared per
  driver, so a net needing taps at several delays gets one chain.  Already
  balanced netlists are returned unchanged.
*/
netlist path_balance( netlist const& ntk, latency_model const& model = latency_model::rsfq() );

/*! \brief Number of DFFs `path_balance` would insert. */
std::size_t balancing_cost( netlist const& ntk, latency_model const& model = latency_model::rsfq() );

/*! \brief Common depth of all primary outputs; throws `netlist_error` if they differ. */
unsigned output_latency( netlist const& ntk, latency_model const& model = latency_model::rsfq() );

/*!
  \brief Binds the key inputs to constants and folds every gate whose value is
  then constant into a CONST gate

  The result describes the timing of the activated chip: logic that can no
  longer influence an output stops contributing to output depth.
*/
netlist activate( netlist const& ntk, bit_vector const& key );

/*!
  \brief Cycle-accurate, bit-parallel simulation of a pipelined netlist

  Every lane is an independent simulation; stimulus words are port-major
  (`word[port * lanes_words + w]`).  At each cycle gates are visited in
  topological order: a gate with latency 0 forwards its fanin values, a gate
  with latency r outputs the last of its r cascaded registers and shifts in the
  value computed from the current fanins.
*/
class clocked_simulator
{
public:
  using word = uint64_t;

  explicit clocked_simulator( netlist const& ntk, std::size_t words = 1,
                              latency_model const& model = latency_model::rsfq() );

  std::size_t words() const noexcept { return words_; }
  std::size_t num_inputs() const noexcept { return inputs_.size(); }
  std::size_t num_key_inputs() const noexcept { return keys_.size(); }
  std::size_t num_outputs() const noexcept { return outputs_.size(); }
  uint64_t cycle() const noexcept { return cycle_; }

  void reset();

  void step( std::span<word const> inputs, std::span<word const> keys, std::span<word> outputs );

  /*! \brief Single-lane convenience wrapper; lane 0 carries the result. */
  bit_vector step( bit_vector const& inputs, bit_vector const& keys );

  struct state
  {
    std::vector<word> registers;
    uint64_t cycle;
  };

  state snapshot() const { return { registers_, cycle_ }; }
  void restore( state const& s );

private:
  struct op
  {
    gate_kind kind;
    net_id out;
    uint32_t first;
    uint32_t count;
    uint32_t regs; /* register stages */
    uint32_t reg_offset;
  };

  std::vector<op> program_;
  std::vector<net_id> pins_;
  std::vector<net_id> inputs_;
  std::vector<net_id> keys_;
  std::vector<net_id> outputs_;
  std::size_t words_;
  std::vector<word> values_;
  std::vector<word> registers_;
  std::vector<word> scratch_;
  uint64_t cycle_ = 0;
};

struct stimulus
{
  bit_vector inputs;
  bit_vector keys;
};

struct sim_trace
{
  std::vector<bit_vector> inputs;
  std::vector<bit_vector> keys;
  std::vector<bit_vector> outputs;
  unsigned warmup = 0; /* cycles [0, warmup) reflect the reset state */

  std::size_t cycles() const noexcept { return outputs.size(); }
  bool is_warmup( std::size_t cycle ) const noexcept { return cycle < warmup; }
};

/*!
  \brief Runs one cycle per stimulus entry from the reset state

  `warmup` is the output latency when outputs are balanced, otherwise the
  maximum output depth.  Throws `width_error` on port mismatches.
*/
sim_trace simulate_clocked( netlist const& ntk, std::span<stimulus const> stimuli,
                            latency_model const& model = latency_model::rsfq() );

/*! \brief CSV dump with columns cycle,inputs,keys,outputs,warmup. */
std::string trace_to_csv( sim_trace const& trace );

} // namespace rsfqlock
