#include "seqent/panel.hpp"

namespace seqent {
namespace {

PointPair periodic_pair(const Sft& sft, const char* x, const char* y) {
  return {std::string(x) + "~|" + y + "~", PointRep::periodic(sft, parse_word(x)), PointRep::periodic(sft, parse_word(y))};
}

/// ...0 0 [core] 0 0... against a periodic point.
PointPair spike_pair(const Sft& sft, const char* core, const char* y) {
  return {"0~" + std::string(core) + "0~|" + y + "~",
          PointRep::eventually_periodic(sft, parse_word("0"), parse_word(core), parse_word("0")),
          PointRep::periodic(sft, parse_word(y))};
}

}  // namespace

MarkovMeasure bernoulli_half() {
  return MarkovMeasure(Sft::full_shift(2), {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}});
}

MarkovMeasure golden_mean_measure() {
  return MarkovMeasure(Sft(2, {{true, true}, {true, false}}), {{Rational(1, 2), Rational(1, 2)}, {1, 0}});
}

MarkovMeasure four_cycle_measure() {
  std::vector<std::vector<bool>> allowed(4, std::vector<bool>(4, false));
  RationalMatrix p(4, RationalVector(4, Rational(0)));
  for (int a = 0; a < 4; ++a) {
    allowed[a][(a + 1) % 4] = true;
    p[a][(a + 1) % 4] = 1;
  }
  return MarkovMeasure(Sft(4, allowed), p);
}

std::vector<PanelSystem> acceptance_panel() {
  std::vector<PanelSystem> panel;

  {
    MarkovMeasure m = bernoulli_half();
    const Sft& s = m.sft();
    std::vector<PointPair> pairs{
        periodic_pair(s, "0", "1"),     periodic_pair(s, "0", "01"),    periodic_pair(s, "01", "10"),
        periodic_pair(s, "1", "10"),    periodic_pair(s, "0", "011"),   periodic_pair(s, "001", "110"),
        periodic_pair(s, "0011", "1"),  spike_pair(s, "1", "0"),        spike_pair(s, "11", "1"),
        spike_pair(s, "101", "01"),
    };
    panel.push_back({"bernoulli", "full 2-shift, Bernoulli(1/2, 1/2)", std::move(m), std::move(pairs)});
  }

  {
    MarkovMeasure m = golden_mean_measure();
    const Sft& s = m.sft();
    std::vector<PointPair> pairs{
        periodic_pair(s, "0", "01"),    periodic_pair(s, "01", "10"),   periodic_pair(s, "0", "10"),
        periodic_pair(s, "001", "010"), periodic_pair(s, "0", "001"),   periodic_pair(s, "010", "100"),
        periodic_pair(s, "0001", "01"), spike_pair(s, "1", "0"),        spike_pair(s, "101", "0"),
        spike_pair(s, "1", "01"),
    };
    panel.push_back({"golden_mean", "golden-mean shift, Markov P = [[1/2, 1/2], [1, 0]]", std::move(m),
                     std::move(pairs)});
  }

  {
    MarkovMeasure m = four_cycle_measure();
    const Sft& s = m.sft();
    std::vector<PointPair> pairs{
        periodic_pair(s, "0123", "1230"), periodic_pair(s, "0123", "2301"), periodic_pair(s, "0123", "3012"),
        periodic_pair(s, "1230", "2301"), periodic_pair(s, "1230", "3012"), periodic_pair(s, "2301", "3012"),
        periodic_pair(s, "1230", "0123"), periodic_pair(s, "2301", "0123"), periodic_pair(s, "3012", "0123"),
        periodic_pair(s, "3012", "2301"),
    };
    panel.push_back({"four_cycle", "periodic 4-cycle, uniform measure", std::move(m), std::move(pairs)});
  }

  return panel;
}

}  // namespace seqent
