#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "snra/array.hpp"
#include "snra/bits.hpp"
#include "snra/error.hpp"
#include "snra/fsm.hpp"

namespace snra::trace {

struct TraceConfig {
  std::uint32_t timescale_ns = 1;
  std::uint32_t clock_period = 2;  // in timescale units; 2 ns = 500 MHz
  std::string scope = "snra";

  void validate() const {
    if (timescale_ns != 1 && timescale_ns != 10 && timescale_ns != 100) {
      throw DomainError("VCD timescale must be 1, 10 or 100 ns");
    }
    if (clock_period == 0 || clock_period % 2 != 0) throw DomainError("clock period must be an even number of ticks");
  }
};

/// Writes controller clocks as a VCD waveform.
///
/// Signals: CLK, STATE[1:0], RWL, WWL[n_h-1:0], BL[n_v-1:0], SL[n_v-1:0],
/// COUNTER. Clock k has its rising edge at k * clock_period, where every
/// signal takes that clock's value; CLK falls half a period later. One
/// extra rising edge at clocks * clock_period shows `final_state` with the
/// counter cleared, so there are clocks + 1 rising-edge timestamps. BL and
/// SL are 'z' while the write path is disconnected (read frames).
class VcdWriter {
 public:
  VcdWriter(std::size_t n_visible, std::size_t n_hidden, TraceConfig config = {})
      : n_v_(n_visible), n_h_(n_hidden), config_(std::move(config)) {
    config_.validate();
    add("CLK", 1);
    add("STATE", 2);
    add("RWL", 1);
    add("WWL", n_h_);
    add("BL", n_v_);
    add("SL", n_v_);
    add("COUNTER", counter_width(n_h_));
  }

  void write(std::span<const ClockRecord> records, std::ostream& out,
             FsmState final_state = FsmState::FeedForward) {
    if (records.empty()) throw DomainError("trace needs at least one clock");
    out << "$version snra cd-fsm trace $end\n";
    out << "$timescale " << config_.timescale_ns << "ns $end\n";
    out << "$scope module " << config_.scope << " $end\n";
    for (const auto& s : signals_) {
      out << "$var wire " << s.width << ' ' << s.id << ' ' << s.name;
      if (s.width > 1) out << " [" << s.width - 1 << ":0]";
      out << " $end\n";
    }
    out << "$upscope $end\n$enddefinitions $end\n";

    const std::uint64_t period = config_.clock_period;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto values = sample(records[k]);
      out << '#' << k * period << '\n';
      if (k == 0) {
        out << "$dumpvars\n";
        for (std::size_t s = 0; s < signals_.size(); ++s) emit(out, s, values[s]);
        out << "$end\n";
      } else {
        for (std::size_t s = 0; s < signals_.size(); ++s) {
          if (values[s] != last_[s]) emit(out, s, values[s]);
        }
      }
      last_ = values;
      out << '#' << k * period + period / 2 << '\n';
      emit(out, kClk, "0");
      last_[kClk] = "0";
    }
    out << '#' << records.size() * period << '\n';
    emit(out, kClk, "1");
    if (const auto st = bits_of(static_cast<unsigned>(final_state), 2); st != last_[kState]) emit(out, kState, st);
    if (const auto c = bits_of(0, signals_[kCounter].width); c != last_[kCounter]) emit(out, kCounter, c);
  }

  std::string write(std::span<const ClockRecord> records, FsmState final_state = FsmState::FeedForward) {
    std::ostringstream ss;
    write(records, ss, final_state);
    return ss.str();
  }

 private:
  enum : std::size_t { kClk, kState, kRwl, kWwl, kBl, kSl, kCounter };

  struct Signal {
    std::string name;
    std::size_t width;
    std::string id;
  };

  void add(std::string name, std::size_t width) {
    signals_.push_back({std::move(name), width, std::string(1, static_cast<char>('!' + signals_.size()))});
  }

  static std::string bits_of(std::uint64_t value, std::size_t width) {
    return BitVector::from_uint(value, width).to_register_string();
  }

  std::vector<std::string> sample(const ClockRecord& r) const {
    const SignalFrame& f = r.frame;
    require_width(f.wwl, n_h_, "WWL");
    require_width(f.bl, n_v_, "BL");
    require_width(f.sl, n_v_, "SL");
    const bool hiz = f.phase == Phase::Read;
    return {
        "1",
        bits_of(static_cast<unsigned>(r.state), 2),
        f.rwl ? "1" : "0",
        f.wwl.to_register_string(),
        hiz ? std::string(n_v_, 'z') : f.bl.to_register_string(),
        hiz ? std::string(n_v_, 'z') : f.sl.to_register_string(),
        bits_of(r.counter, signals_[kCounter].width),
    };
  }

  void emit(std::ostream& out, std::size_t s, const std::string& value) const {
    if (signals_[s].width == 1) {
      out << value << signals_[s].id << '\n';
    } else {
      out << 'b' << value << ' ' << signals_[s].id << '\n';
    }
  }

  std::size_t n_v_;
  std::size_t n_h_;
  TraceConfig config_;
  std::vector<Signal> signals_;
  std::vector<std::string> last_;
};

inline std::string write_vcd(std::span<const ClockRecord> records, std::size_t n_visible, std::size_t n_hidden,
                             const TraceConfig& config = {}, FsmState final_state = FsmState::FeedForward) {
  VcdWriter w(n_visible, n_hidden, config);
  return w.write(records, final_state);
}

// ---------------------------------------------------------------------------
// Minimal VCD reader: $timescale, $var, $dumpvars, #time, scalar and 'b'
// vector changes. Enough to read back what VcdWriter produces and other
// simple dumps.
// ---------------------------------------------------------------------------

struct VcdVariable {
  std::string id;
  std::string name;
  std::size_t width = 1;
};

struct VcdChange {
  std::uint64_t time = 0;
  std::string id;
  std::string value;  // MSB first; scalars are one character
};

struct VcdDocument {
  std::string timescale;
  std::vector<VcdVariable> variables;
  std::vector<std::uint64_t> timestamps;
  std::vector<VcdChange> changes;

  const VcdVariable* by_name(std::string_view name) const {
    for (const auto& v : variables) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }
};

inline VcdDocument parse_vcd(std::string_view text) {
  std::istringstream in{std::string(text)};
  VcdDocument doc;
  std::string tok;
  std::uint64_t now = 0;
  bool have_time = false;

  auto read_until_end = [&](std::vector<std::string>& body) {
    std::string t;
    while (in >> t) {
      if (t == "$end") return;
      body.push_back(t);
    }
    throw FormatError("unterminated VCD section");
  };
  auto change = [&](std::string id, std::string value) {
    if (!have_time) throw FormatError("value change before first timestamp");
    doc.changes.push_back({now, std::move(id), std::move(value)});
  };

  while (in >> tok) {
    if (tok == "$var") {
      std::vector<std::string> body;
      read_until_end(body);
      if (body.size() < 4) throw FormatError("malformed $var");
      doc.variables.push_back({body[2], body[3], static_cast<std::size_t>(std::stoul(body[1]))});
    } else if (tok == "$timescale") {
      std::vector<std::string> body;
      read_until_end(body);
      for (const auto& b : body) doc.timescale += b;
    } else if (tok == "$dumpvars" || tok == "$dumpall" || tok == "$dumpon" || tok == "$dumpoff" || tok == "$end") {
      // value changes inside these blocks are read as ordinary changes
    } else if (tok[0] == '$') {
      std::vector<std::string> body;
      read_until_end(body);
    } else if (tok[0] == '#') {
      now = std::stoull(tok.substr(1));
      have_time = true;
      doc.timestamps.push_back(now);
    } else if (tok[0] == 'b' || tok[0] == 'B') {
      std::string id;
      if (!(in >> id)) throw FormatError("vector change without identifier");
      change(id, tok.substr(1));
    } else if (tok[0] == '0' || tok[0] == '1' || tok[0] == 'x' || tok[0] == 'X' || tok[0] == 'z' || tok[0] == 'Z') {
      if (tok.size() < 2) throw FormatError("scalar change without identifier");
      change(tok.substr(1), std::string(1, tok[0]));
    } else {
      throw FormatError("unsupported VCD token '" + tok + "'");
    }
  }
  return doc;
}

/// Rebuilds the clock records of a trace written by VcdWriter: one record
/// per rising CLK edge, excluding the closing edge.
inline std::vector<ClockRecord> records_from_vcd(const VcdDocument& doc) {
  auto need = [&](std::string_view name) -> const VcdVariable& {
    const VcdVariable* v = doc.by_name(name);
    if (v == nullptr) throw FormatError("trace lacks signal " + std::string(name));
    return *v;
  };
  const VcdVariable& clk = need("CLK");
  const VcdVariable& state = need("STATE");
  const VcdVariable& rwl = need("RWL");
  const VcdVariable& wwl = need("WWL");
  const VcdVariable& bl = need("BL");
  const VcdVariable& sl = need("SL");
  const VcdVariable& counter = need("COUNTER");

  std::map<std::string, std::string> current;
  auto extend = [](const std::string& value, std::size_t width) {
    // VCD drops leading zeros; a leading z/x extends as itself.
    if (value.size() >= width) return value.substr(value.size() - width);
    const char pad = (value[0] == 'z' || value[0] == 'x') ? value[0] : '0';
    return std::string(width - value.size(), pad) + value;
  };
  auto bits = [&](const VcdVariable& v) {
    const auto it = current.find(v.id);
    if (it == current.end()) throw FormatError("signal " + v.name + " has no value");
    return extend(it->second, v.width);
  };
  auto to_uint = [](const std::string& s) {
    std::uint64_t x = 0;
    for (char c : s) x = (x << 1) | (c == '1' ? 1U : 0U);
    return x;
  };
  // z/x read back as 0, which is how read frames store the floating lines.
  auto to_bits = [](const std::string& s) {
    std::string clean = s;
    for (char& c : clean) {
      if (c != '1') c = '0';
    }
    return BitVector::from_register_string(clean);
  };

  std::vector<ClockRecord> edges;
  std::size_t k = 0;
  for (std::uint64_t t : doc.timestamps) {
    const std::string clk_before = current.count(clk.id) ? current[clk.id] : "x";
    for (; k < doc.changes.size() && doc.changes[k].time == t; ++k) current[doc.changes[k].id] = doc.changes[k].value;
    if (current.count(clk.id) && current[clk.id] == "1" && clk_before != "1") {
      ClockRecord r;
      r.state = static_cast<FsmState>(to_uint(bits(state)) & 3U);
      r.counter = to_uint(bits(counter));
      const bool read = bits(rwl) == "1";
      r.frame.phase = read ? Phase::Read : Phase::Write;
      r.frame.rwl = read;
      r.frame.wwl = to_bits(bits(wwl));
      r.frame.bl = to_bits(bits(bl));
      r.frame.sl = to_bits(bits(sl));
      edges.push_back(std::move(r));
    }
  }
  if (!edges.empty()) edges.pop_back();
  return edges;
}

}  // namespace snra::trace
