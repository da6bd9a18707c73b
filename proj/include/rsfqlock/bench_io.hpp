/*!
  \file bench_io.hpp
  \brief Reader and writer for the extended ISCAS BENCH format

  Grammar, one statement per line, `#` starts a comment:

      INPUT(x)  KEYINPUT(k)  OUTPUT(y)
      y = KIND(a, b, ...)

  KIND is one of AND NAND OR NOR XOR XNOR NOT BUF MUX2 DFF CDFF CONST0 CONST1
  (case-insensitive; BUFF is read as BUF).  MUX2 pins are (select, in0, in1).
  Net names are case-sensitive.
*/

#pragma once

#include "netlist.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace rsfqlock
{

/*! \brief Parses BENCH text; throws `parse_error` (with line) or `cycle_error`. */
netlist parse_bench( std::string_view text );

/*!
  \brief Serializes in net-id order so that `parse_bench( write_bench( n ) ) == n`

  Leading input declarations come first, then all OUTPUT lines, then the
  remaining definitions.
*/
std::string write_bench( netlist const& ntk );

netlist read_bench_file( std::filesystem::path const& path );
void write_bench_file( netlist const& ntk, std::filesystem::path const& path );

std::string read_text_file( std::filesystem::path const& path );
void write_text_file( std::filesystem::path const& path, std::string_view text );

} // namespace rsfqlock
