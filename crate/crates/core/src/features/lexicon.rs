//! Word lists for the lexically defined features. Entries are lower-case
//! surface forms unless the list is documented as lemma-based.

pub const FIRST_PERSON: &[&str] = &[
    "i", "me", "we", "us", "my", "our", "myself", "ourselves", "mine", "ours",
];

pub const SECOND_PERSON: &[&str] = &[
    "you", "your", "yourself", "yourselves", "thy", "thee", "thyself", "thou", "yours",
];

pub const THIRD_PERSON: &[&str] = &[
    "she", "he", "they", "her", "him", "them", "his", "their", "himself", "herself",
    "themselves", "hers", "theirs",
];

pub const DEMONSTRATIVES: &[&str] = &["this", "that", "these", "those"];

pub const INDEFINITE_PRONOUNS: &[&str] = &[
    "anybody", "anyone", "anything", "everybody", "everyone", "everything", "nobody", "none",
    "nothing", "nowhere", "somebody", "someone", "something",
];

pub const PLACE_ADVERBS: &[&str] = &[
    "aboard", "above", "abroad", "across", "ahead", "alongside", "around", "ashore", "astern",
    "away", "behind", "below", "beneath", "beside", "downhill", "downstairs", "downstream",
    "east", "far", "hereabouts", "indoors", "inland", "inshore", "inside", "locally", "near",
    "nearby", "north", "nowhere", "outdoors", "outside", "overboard", "overland", "overseas",
    "south", "underfoot", "underground", "underneath", "uphill", "upstairs", "upstream", "west",
];

pub const TIME_ADVERBS: &[&str] = &[
    "afterwards", "again", "earlier", "early", "eventually", "formerly", "immediately",
    "initially", "instantly", "late", "lately", "later", "momentarily", "now", "nowadays",
    "once", "originally", "presently", "previously", "recently", "shortly", "simultaneously",
    "subsequently", "today", "to-day", "tomorrow", "to-morrow", "tonight", "to-night",
    "yesterday",
];

pub const NOMINAL_SUFFIXES: &[&str] = &[
    "tion", "tions", "ment", "ments", "ness", "nesses", "ity", "ities",
];

pub const WH_WORDS: &[&str] = &[
    "what", "where", "when", "how", "whether", "why", "whoever", "whomever", "whichever",
    "wherever", "whenever", "whatever", "however", "who", "whom", "which", "whose",
];

pub const RELATIVE_WH: &[&str] = &["who", "whom", "whose", "which"];

pub const CONCESSIVE: &[&str] = &["although", "though", "tho"];

pub const CONDITIONAL: &[&str] = &["if", "unless"];

pub const OTHER_SUBORDINATORS: &[&str] = &[
    "since", "while", "whilst", "whereupon", "whereas", "whereby",
];

pub const OTHER_SUBORDINATOR_PHRASES: &[&[&str]] = &[
    &["as", "long", "as"],
    &["as", "soon", "as"],
    &["inasmuch", "as"],
    &["insofar", "as"],
    &["insomuch", "as"],
    &["forasmuch", "as"],
];

pub const CONJUNCTS: &[&str] = &[
    "alternatively", "altogether", "consequently", "conversely", "e.g.", "eg", "else",
    "furthermore", "hence", "however", "i.e.", "ie", "instead", "likewise", "moreover",
    "namely", "nevertheless", "nonetheless", "notwithstanding", "otherwise", "rather",
    "similarly", "therefore", "thus", "viz", "viz.",
];

pub const CONJUNCT_PHRASES: &[&[&str]] = &[
    &["in", "comparison"],
    &["in", "contrast"],
    &["in", "particular"],
    &["in", "addition"],
    &["in", "conclusion"],
    &["in", "consequence"],
    &["in", "sum"],
    &["in", "summary"],
    &["for", "example"],
    &["for", "instance"],
    &["on", "the", "contrary"],
    &["on", "the", "other", "hand"],
    &["as", "a", "result"],
    &["as", "a", "consequence"],
];

pub const DOWNTONERS: &[&str] = &[
    "almost", "barely", "hardly", "merely", "mildly", "nearly", "only", "partially", "partly",
    "practically", "scarcely", "slightly", "somewhat",
];

pub const HEDGES: &[&str] = &["almost", "maybe"];

pub const HEDGE_PHRASES: &[&[&str]] = &[
    &["at", "about"],
    &["something", "like"],
    &["more", "or", "less"],
];

pub const AMPLIFIERS: &[&str] = &[
    "absolutely", "altogether", "completely", "enormously", "entirely", "extremely", "fully",
    "greatly", "highly", "intensely", "perfectly", "strongly", "thoroughly", "totally",
    "utterly", "very",
];

pub const EMPHATIC_ADVERBS: &[&str] = &["just", "really", "most", "more"];

pub const EMPHATIC_PHRASES: &[&[&str]] = &[
    &["for", "sure"],
    &["a", "lot"],
    &["such", "a"],
    &["such", "an"],
];

pub const DISCOURSE_PARTICLES: &[&str] = &["well", "now", "anyway", "anyhow", "anyways"];

pub const POSSIBILITY_MODALS: &[&str] = &["can", "may", "might", "could", "ca"];
pub const NECESSITY_MODALS: &[&str] = &["ought", "should", "must"];
pub const PREDICTIVE_MODALS: &[&str] = &["will", "would", "shall", "'ll", "'d", "wo"];

/// Lemma-based.
pub const PUBLIC_VERBS: &[&str] = &[
    "acknowledge", "add", "admit", "affirm", "agree", "allege", "announce", "argue", "assert",
    "bet", "boast", "certify", "claim", "comment", "complain", "concede", "confess", "confide",
    "confirm", "contend", "convey", "declare", "deny", "disclose", "exclaim", "explain",
    "forecast", "foretell", "guarantee", "hint", "insist", "maintain", "mention", "object",
    "predict", "proclaim", "promise", "pronounce", "prophesy", "protest", "remark", "repeat",
    "reply", "report", "say", "state", "submit", "suggest", "swear", "testify", "vow", "warn",
    "write",
];

/// Lemma-based.
pub const PRIVATE_VERBS: &[&str] = &[
    "accept", "anticipate", "ascertain", "assume", "believe", "calculate", "check", "conclude",
    "conjecture", "consider", "decide", "deduce", "deem", "demonstrate", "determine",
    "discover", "doubt", "dream", "ensure", "establish", "estimate", "expect", "fancy", "fear",
    "feel", "find", "foresee", "forget", "gather", "guess", "hear", "hold", "hope", "imagine",
    "imply", "indicate", "infer", "insure", "judge", "know", "learn", "mean", "note", "notice",
    "observe", "perceive", "presume", "presuppose", "pretend", "prove", "realize", "reason",
    "recall", "reckon", "recognize", "reflect", "remember", "reveal", "see", "sense", "show",
    "signify", "suppose", "suspect", "think", "understand",
];

/// Lemma-based.
pub const SUASIVE_VERBS: &[&str] = &[
    "agree", "allow", "arrange", "ask", "beg", "command", "concede", "decide", "decree",
    "demand", "desire", "determine", "enjoin", "ensure", "entreat", "grant", "insist",
    "instruct", "intend", "move", "ordain", "order", "pledge", "pray", "prefer", "pronounce",
    "propose", "recommend", "request", "require", "resolve", "rule", "stipulate", "suggest",
    "urge", "vote",
];

pub const SEEM_APPEAR: &[&str] = &["seem", "appear"];

pub fn contains(list: &[&str], word: &str) -> bool {
    list.contains(&word)
}
