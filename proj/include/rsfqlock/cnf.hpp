/*!
  \file cnf.hpp
  \brief Clause lists, Tseitin encoding of netlists and the key miter

  Literals are DIMACS-style signed integers: variable v is literal v, its
  negation -v.  Variables are numbered from 1.
*/

#pragma once

#include "netlist.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsfqlock
{

using literal = int;

struct cnf
{
  int num_vars = 0;
  std::vector<std::vector<literal>> clauses;

  /*! \brief Net id -> literal after `encode_tseitin`; wires share their fanin's literal. */
  std::vector<literal> net_literal;

  int new_var() { return ++num_vars; }

  /*! \brief Appends a clause; throws `error` if a literal names an unknown variable. */
  void add_clause( std::vector<literal> clause );

  friend bool operator==( cnf const&, cnf const& ) = default;
};

/*! \brief DIMACS text with a `p cnf V C` header. */
std::string to_dimacs( cnf const& f );

/*! \brief Parses DIMACS; comment lines (`c`) are skipped; throws `parse_error`. */
cnf from_dimacs( std::string_view text );

/*! \brief Literals of one circuit copy inside a formula. */
struct circuit_literals
{
  std::vector<literal> nets; /* per net id */
  std::vector<literal> inputs;
  std::vector<literal> keys;
  std::vector<literal> outputs;
};

/*!
  \brief Adds one Tseitin copy of `ntk` to `f`

  Primary and key inputs take the given literals, or fresh variables when a
  list is not supplied.  Every other non-wire gate gets a fresh variable;
  BUF/DFF/CDFF alias their fanin.
*/
circuit_literals append_circuit( cnf& f, netlist const& ntk, std::optional<std::span<literal const>> inputs = std::nullopt,
                                 std::optional<std::span<literal const>> keys = std::nullopt );

/*! \brief Standalone encoding; `net_literal` is filled in. */
cnf encode_tseitin( netlist const& ntk );

struct miter
{
  cnf formula;
  std::vector<literal> inputs;
  std::vector<literal> keys_a;
  std::vector<literal> keys_b;
  std::vector<literal> outputs_a;
  std::vector<literal> outputs_b;

  /*! \brief When nonzero, the output-difference clause only holds under assumption `guard`. */
  literal guard = 0;
};

/*!
  \brief Two copies sharing the primary inputs, with independent key groups,
  and a clause asserting that at least one output pair differs
*/
miter build_miter( netlist const& locked, bool guarded = false );

} // namespace rsfqlock
