//! Fixtures shared by unit tests.

use crate::kb::KnowledgeBase;
pub use crate::synth::LABEL_PROPAGATION_RULES;

/// The label-propagation program over the given facts. Database predicates
/// missing from `facts` are simply undefined.
pub fn hyperlink_kb(facts: &str) -> KnowledgeBase {
    KnowledgeBase::from_sources(LABEL_PROPAGATION_RULES, facts).unwrap()
}
