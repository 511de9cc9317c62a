#pragma once

#include <iosfwd>
#include <string>

#include "tubalkit/tensor.hpp"

namespace tubalkit {

// Binary: "TTEN1\0", u32 LE order, order x u64 LE dims, f64 LE values.
void write_tensor(const std::string& path, const DenseTensor& x);
void write_tensor(std::ostream& out, const DenseTensor& x);

// Text: "dims: n1 n2 ..." then whitespace separated values.
void write_tensor_text(const std::string& path, const DenseTensor& x);
void write_tensor_text(std::ostream& out, const DenseTensor& x);

// Detects binary or text format from the first bytes.
DenseTensor read_tensor(const std::string& path);
DenseTensor read_tensor(std::istream& in);

}  // namespace tubalkit
