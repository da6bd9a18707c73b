/*!
  \file netlist.hpp
  \brief Gate-level netlist IR shared by parsing, transforms, encoding and simulation

  Nets are dense integer ids; each net is driven by exactly one gate (primary
  and key inputs are pseudo-gates).  Fanins may refer to nets defined later in
  the gate list, so declaration order and topological order are independent.
*/

#pragma once

#include "bit_vector.hpp"
#include "error.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rsfqlock
{

using net_id = uint32_t;

enum class gate_kind : uint8_t
{
  input,
  key_input,
  const0,
  const1,
  buf, /* JTL / splitter */
  inv,
  and_,
  nand,
  or_,
  nor,
  xor_,
  xnor,
  mux2, /* fanins: select, in0, in1 */
  dff,
  cdff /* camouflaged DFF, behaves as a JTL */
};

inline constexpr std::size_t num_gate_kinds = 15;

inline constexpr std::array<gate_kind, num_gate_kinds> all_gate_kinds = {
    gate_kind::input, gate_kind::key_input, gate_kind::const0, gate_kind::const1, gate_kind::buf,
    gate_kind::inv, gate_kind::and_, gate_kind::nand, gate_kind::or_, gate_kind::nor,
    gate_kind::xor_, gate_kind::xnor, gate_kind::mux2, gate_kind::dff, gate_kind::cdff };

/*! \brief BENCH keyword for a kind (INPUT, KEYINPUT, AND, ..., CDFF). */
std::string_view keyword( gate_kind kind );

/*! \brief Case-insensitive keyword lookup; accepts the ISCAS spelling BUFF for BUF. */
std::optional<gate_kind> kind_from_keyword( std::string_view word );

bool is_port( gate_kind kind ) noexcept;
bool is_constant( gate_kind kind ) noexcept;

/*! \brief True for BUF, DFF and CDFF, which are identity functions in the combinational view. */
bool is_wire( gate_kind kind ) noexcept;

bool arity_ok( gate_kind kind, std::size_t fanins ) noexcept;
std::string_view arity_rule( gate_kind kind );

struct gate
{
  gate_kind kind;
  std::vector<net_id> fanins;
  std::string name;

  friend bool operator==( gate const&, gate const& ) = default;
};

class netlist
{
public:
  net_id add_input( std::string name );
  net_id add_key_input( std::string name );

  /*! \brief Appends a gate.  Fanins are not checked here; see `validate`. */
  net_id add_gate( gate_kind kind, std::vector<net_id> fanins, std::string name );

  void add_output( net_id driver );
  void set_output( std::size_t index, net_id driver );
  void set_fanin( net_id g, std::size_t pin, net_id driver );

  /*! \brief Changes kind and fanins of an existing gate; ports stay ports. */
  void rewrite_gate( net_id g, gate_kind kind, std::vector<net_id> fanins );

  /*! \brief Turns every key input into a constant gate carrying the given bit. */
  void bind_key_inputs( bit_vector const& key );

  /*! \brief Redirects every reader of `from` (gate pins and outputs) to `to`, skipping gate `except`. */
  void redirect_fanouts( net_id from, net_id to, std::optional<net_id> except = std::nullopt );

  /*! \brief Returns `stem` if unused, otherwise `stem_<n>` for the smallest free n. */
  std::string unique_name( std::string_view stem ) const;

  std::optional<net_id> find( std::string_view name ) const;

  std::size_t size() const noexcept { return gates_.size(); }
  gate const& at( net_id n ) const { return gates_.at( n ); }
  gate const& operator[]( net_id n ) const { return gates_[n]; }
  std::vector<gate> const& gates() const noexcept { return gates_; }

  std::vector<net_id> const& inputs() const noexcept { return inputs_; }
  std::vector<net_id> const& key_inputs() const noexcept { return keys_; }
  std::vector<net_id> const& outputs() const noexcept { return outputs_; }

  std::size_t num_inputs() const noexcept { return inputs_.size(); }
  std::size_t num_key_inputs() const noexcept { return keys_.size(); }
  std::size_t num_outputs() const noexcept { return outputs_.size(); }

  /*! \brief Gate readers per net (a gate reading a net twice appears twice). */
  std::vector<std::vector<net_id>> fanouts() const;

  friend bool operator==( netlist const& a, netlist const& b )
  {
    return a.gates_ == b.gates_ && a.inputs_ == b.inputs_ && a.keys_ == b.keys_ && a.outputs_ == b.outputs_;
  }

private:
  net_id push( gate g );

  std::vector<gate> gates_;
  std::vector<net_id> inputs_;
  std::vector<net_id> keys_;
  std::vector<net_id> outputs_;
  std::unordered_map<std::string, net_id> by_name_;
};

struct diagnostic
{
  std::string net;
  std::string rule;
  std::string message;
};

/*! \brief Checks all structural invariants; empty result iff the netlist is valid. */
std::vector<diagnostic> validate( netlist const& ntk );

/*! \brief Throws `netlist_error` carrying the first diagnostic if `validate` is non-empty. */
void require_valid( netlist const& ntk );

/*!
  \brief Topological order over all nets

  Every gate follows its fanins.  Among ready gates the smallest id goes first,
  so the order is a pure function of the netlist.  Throws `cycle_error` naming a
  net that lies on a cycle.
*/
std::vector<net_id> topo_order( netlist const& ntk );

/*!
  \brief Combinational evaluation (BUF, DFF and CDFF are identity wires)

  Throws `width_error` if the pattern or key widths do not match the ports.
*/
bit_vector eval_comb( netlist const& ntk, bit_vector const& inputs, bit_vector const& keys );

/*!
  \brief Bit-parallel combinational evaluator

  Each 64-bit word carries 64 independent evaluations.  Input and key words are
  laid out port-major: `word[port * words + w]`.
*/
class comb_evaluator
{
public:
  using word = uint64_t;

  comb_evaluator( netlist const& ntk, std::size_t words );

  std::size_t words() const noexcept { return words_; }

  void run( std::vector<word> const& inputs, std::vector<word> const& keys, std::vector<word>& outputs );

  /*! \brief Values of every net after the last `run`, laid out `net * words + w`. */
  std::vector<word> const& values() const noexcept { return values_; }

private:
  struct step
  {
    gate_kind kind;
    net_id out;
    uint32_t first;
    uint32_t count;
  };

  std::vector<step> program_;
  std::vector<net_id> pins_;
  std::vector<net_id> inputs_;
  std::vector<net_id> keys_;
  std::vector<net_id> outputs_;
  std::size_t words_;
  std::vector<word> values_;
};

/*! \brief Per-kind JJ cost table, loaded from or saved to JSON as `{"AND": 11, ...}`. */
using jj_cost_table = std::map<gate_kind, double>;

jj_cost_table default_jj_costs();
jj_cost_table jj_costs_from_json( std::string const& text );
std::string jj_costs_to_json( jj_cost_table const& costs );

struct area_report
{
  std::map<gate_kind, std::size_t> counts; /* ports excluded */
  std::size_t total_gates = 0;
  double jj_estimate = 0.0;
};

/*! \brief Gate statistics; throws `netlist_error` if a present kind has no cost entry. */
area_report area_stats( netlist const& ntk, jj_cost_table const& costs = default_jj_costs() );

} // namespace rsfqlock
