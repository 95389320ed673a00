#pragma once

#include <string>

#include "pdham/sysdef/model.hpp"

namespace pdham::sysdef {

enum class Format { Text, Latex, Json };

std::string render(const Form0& f, Format fmt);
std::string render(const Form1& t, Format fmt);
std::string render(const Form2& w, Format fmt);
std::string render(const VerticalField& y, Format fmt);
std::string render(const ConstraintSet& c, Format fmt);
std::string render(const PDSystem& s, Format fmt);

/// The whole model as a .pdh document; parsing it back gives the same model.
std::string render_model(const SystemModel& model);

/// Coordinate name in LaTeX (trailing digits become a subscript).
std::string latex_symbol(const std::string& name);

}  // namespace pdham::sysdef
