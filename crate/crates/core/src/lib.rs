//! Measuring how closely a language model's verbalized answer distributions
//! match human survey response distributions.
//!
//! The pieces are independent: [`survey`] turns questionnaires and response
//! counts into [`survey::OpinionDistribution`]s, [`prompt`] renders prompts
//! that ask a model to verbalize a distribution, [`parser`] reads the
//! model's answer back, and [`metrics`] scores and compares the results.

pub mod lang;
pub mod metrics;
pub mod parser;
pub mod prompt;
pub mod survey;

pub use lang::{CountryCode, Language};
pub use metrics::{alignment_per_question, wasserstein_1d, AlignmentScore};
pub use parser::{parse_verbalized, ParseFailure, ParsedDistribution};
pub use prompt::{format_distribution_line, PromptSpec, PromptText, SteeringBase, SteeringStrategy, Templates};
pub use survey::{OpinionDistribution, Question, QuestionId, Questionnaire, Wave};
