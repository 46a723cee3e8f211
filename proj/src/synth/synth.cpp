#include "synth/synth.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace misengine {

namespace {

const std::vector<std::string> kNouns{
    "cup",    "bowl",   "plate",  "knife",   "spoon",  "fork",   "pan",     "pot",     "lid",    "jar",
    "bottle", "tap",    "sponge", "towel",   "board",  "onion",  "tomato",  "carrot",  "potato", "apple",
    "bread",  "cheese", "egg",    "butter",  "flour",  "dough",  "rice",    "pasta",   "sauce",  "oil",
    "salt",   "pepper", "drawer", "cupboard", "fridge", "oven",  "kettle",  "mug",     "glass",  "tray"};

const std::vector<std::string> kAdjectives{"red",   "blue",  "green", "small", "large", "metal", "wooden",
                                           "glass", "white", "black", "round", "flat",  "empty", "full",
                                           "clean", "dirty", "old",   "new",   "tall",  "short"};

// Bijective base-|adjectives| prefix over the base nouns, so every index
// maps to a distinct phrase.
std::string noun_phrase(std::uint64_t i) {
  std::string out = kNouns[i % kNouns.size()];
  std::uint64_t q = i / kNouns.size();
  while (q > 0) {
    out = kAdjectives[(q - 1) % kAdjectives.size()] + " " + out;
    q = (q - 1) / kAdjectives.size();
  }
  return out;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string surface(const std::string& verb, const std::string& noun, std::uint64_t variant) {
  switch (variant % 5) {
    case 0: return verb + " the " + noun;
    case 1: return capitalized(verb) + " " + noun + ".";
    case 2: return verb + " the " + noun + ". Then move on";
    case 3: return verb + " a " + noun;
    default: return upper(verb) + " THE " + upper(noun) + "!";
  }
}

BBox random_box(Rng& rng, int w, int h) {
  const auto bw = 40 + rng.below(static_cast<std::uint64_t>(w) / 4);
  const auto bh = 40 + rng.below(static_cast<std::uint64_t>(h) / 4);
  const auto x = rng.below(static_cast<std::uint64_t>(w) - bw);
  const auto y = rng.below(static_cast<std::uint64_t>(h) - bh);
  return BBox{static_cast<double>(x), static_cast<double>(y), static_cast<double>(bw), static_cast<double>(bh)};
}

struct Builder {
  SynthCorpus corpus;
  Rng rng;
  std::uint32_t participants;
  std::uint32_t environments;
  double missing_pnr = 0;
  double missing_boxes = 0;

  void add(const std::string& id, const std::string& text, const SynthTruth& truth, std::uint64_t serial) {
    constexpr int kW = 1920, kH = 1080;
    ActionRecord r;
    r.record_id = id;
    r.video_id = "video" + std::to_string(serial / 8);
    r.clip_start_frame = static_cast<std::int64_t>(serial) * 300;
    r.clip_end_frame = r.clip_start_frame + 239;
    r.fps = Rational{30, 1};
    r.fps_defaulted = false;
    r.description = text;
    r.taxonomy_verb = truth.verb_class;
    r.taxonomy_noun = truth.noun_class;
    r.frame_width = kW;
    r.frame_height = kH;
    r.participant_id = "P" + std::to_string(rng.below(participants));
    r.environment_id = "E" + std::to_string(rng.below(environments));
    if (!(rng.unit() < missing_pnr)) {
      r.pnr_frame = r.clip_start_frame + 60 + static_cast<std::int64_t>(rng.below(120));
    }
    if (r.pnr_frame && !(rng.unit() < missing_boxes)) {
      std::vector<BBox> hands{random_box(rng, kW, kH)};
      if (rng.below(2)) hands.push_back(random_box(rng, kW, kH));
      r.hand_boxes = std::move(hands);
      r.object_boxes = std::vector<BBox>{random_box(rng, kW, kH)};
    }
    corpus.truth.emplace(id, truth);
    corpus.records.push_back(std::move(r));
  }
};

}  // namespace

const std::vector<std::string>& synth_verbs() {
  static const std::vector<std::string> verbs{
      "add",     "adjust",  "arrange", "attach", "bake",    "blend",   "boil",     "brush",    "carry",  "check",
      "chop",    "clean",   "close",   "coat",   "collect", "cook",    "cover",    "crack",    "crush",  "cut",
      "dice",    "dip",     "drain",   "drop",   "dry",     "empty",   "fill",     "flip",     "fold",   "fry",
      "grab",    "grate",   "grind",   "hang",   "heat",    "hold",    "insert",   "inspect",  "knead",  "lift",
      "load",    "mash",    "measure", "melt",   "mix",     "move",    "open",     "peel",     "place",  "pour",
      "press",   "pull",    "push",    "put",    "remove",  "rinse",   "roll",     "rotate",   "rub",    "scoop",
      "scrape",  "scrub",   "season",  "shake",  "slice",   "soak",    "spray",    "spread",   "sprinkle", "squeeze",
      "stack",   "stir",    "store",   "strain", "take",    "taste",   "tilt",     "touch",    "transfer", "trim",
      "turn",    "twist",   "unwrap",  "wash",   "weigh",   "whisk",   "wipe",     "wrap",     "pick up",  "put down",
      "take out", "turn on", "turn off", "wipe down", "pour out", "throw away", "put away", "fill up", "lay out",
      "set down"};
  return verbs;
}

SynthCorpus synth_grid(const GridSpec& spec) {
  const auto& verbs = synth_verbs();
  if (spec.verbs == 0 || spec.nouns == 0 || spec.records_per_group == 0) {
    fail(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  }
  if (spec.verbs > verbs.size()) {
    fail(ErrorCode::kInvalidArgument, "at most " + std::to_string(verbs.size()) + " synthetic verbs");
  }
  Builder b{{}, Rng::stream(spec.seed, 0x67726964), std::max(1u, spec.participants), std::max(1u, spec.environments)};
  const std::uint64_t total = std::uint64_t{spec.verbs} * spec.nouns * spec.records_per_group + spec.noise_groups;
  b.corpus.records.reserve(total);
  b.corpus.truth.reserve(total);

  std::uint64_t serial = 0;
  for (std::uint32_t v = 0; v < spec.verbs; ++v) {
    for (std::uint32_t n = 0; n < spec.nouns; ++n) {
      const SynthTruth t{verbs[v], noun_phrase(n), v, n};
      for (std::uint32_t k = 0; k < spec.records_per_group; ++k, ++serial) {
        const std::string id = "g" + std::to_string(v) + "x" + std::to_string(n) + "r" + std::to_string(k);
        b.add(id, surface(t.verb, t.noun, spec.surface_variants ? k : 0), t, serial);
      }
    }
  }
  for (std::uint32_t i = 0; i < spec.noise_groups; ++i, ++serial) {
    // Nouns past the grid: a singleton group is never eligible.
    const std::uint32_t v = i % spec.verbs;
    const std::uint64_t n = std::uint64_t{spec.nouns} + i;
    const SynthTruth t{verbs[v], noun_phrase(n), v, static_cast<std::int64_t>(n)};
    b.add("noise" + std::to_string(i), surface(t.verb, t.noun, 0), t, serial);
  }
  shuffle(b.corpus.records, b.rng);
  return std::move(b.corpus);
}

SynthCorpus synth_random(const RandomSpec& spec) {
  const auto& verbs = synth_verbs();
  if (spec.groups == 0 || spec.max_records_per_group == 0) fail(ErrorCode::kInvalidArgument, "empty random corpus");
  Rng rng = Rng::stream(spec.seed, 0x72616e64);
  // Vocabulary roughly sqrt(2 * groups) per role so that every category has
  // candidates.
  std::uint64_t side = 2;
  while (side * side < 2ull * spec.groups) ++side;
  const std::uint64_t n_verbs = std::min<std::uint64_t>(side, verbs.size());
  const std::uint64_t n_nouns = (2ull * spec.groups + n_verbs - 1) / n_verbs;
  const std::uint64_t cells = n_verbs * n_nouns;

  std::vector<std::uint64_t> cell_ids(cells);
  for (std::uint64_t i = 0; i < cells; ++i) cell_ids[i] = i;
  partial_shuffle(cell_ids, spec.groups, rng);

  Builder b{{}, Rng::stream(spec.seed, 0x7265636f7264), std::max(1u, spec.participants),
            std::max(1u, spec.environments), spec.missing_pnr, spec.missing_boxes};
  std::uint64_t serial = 0;
  for (std::uint32_t gi = 0; gi < spec.groups; ++gi) {
    const std::uint64_t v = cell_ids[gi] / n_nouns, n = cell_ids[gi] % n_nouns;
    const SynthTruth t{verbs[v], noun_phrase(n), static_cast<std::int64_t>(v / 2), static_cast<std::int64_t>(n / 2)};
    const auto k = 1 + rng.below(spec.max_records_per_group);
    for (std::uint64_t j = 0; j < k; ++j, ++serial) {
      const std::string id = "s" + std::to_string(gi) + "r" + std::to_string(j);
      b.add(id, surface(t.verb, t.noun, rng.below(5)), t, serial);
    }
  }
  shuffle(b.corpus.records, rng);
  return std::move(b.corpus);
}

}  // namespace misengine
