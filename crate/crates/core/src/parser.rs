//! Extraction of verbalized distributions from raw model output.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::survey::{OpinionDistribution, Question};

pub const DEFAULT_TOLERANCE: f64 = 10.0;
pub const EXCERPT_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Repair {
    QuoteVariant,
    MissingPercentSign,
    MissingKeyZeroFilled,
    Renormalized,
    ExtractedFromProse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedDistribution {
    pub probs: OpinionDistribution,
    /// Sum of the stated percentages before renormalization.
    pub raw_sum: f64,
    pub repairs: Vec<Repair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FailureKind {
    NoCandidateFound,
    InvalidKeys,
    DuplicateKeys,
    SumOutOfTolerance,
    NegativeValue,
    Empty,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub kind: FailureKind,
    pub excerpt: String,
}

impl ParseFailure {
    fn new(kind: FailureKind, text: &str) -> Self {
        ParseFailure { kind, excerpt: text.chars().take(EXCERPT_LIMIT).collect() }
    }
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.excerpt)
    }
}

impl std::error::Error for ParseFailure {}

const QUOTES: [char; 7] = ['\'', '"', '‘', '’', '“', '”', '`'];

fn is_colon(c: char) -> bool {
    c == ':' || c == '：'
}

fn is_comma(c: char) -> bool {
    c == ',' || c == '，'
}

fn is_percent(c: char) -> bool {
    c == '%' || c == '％'
}

/// Exact decimal `mantissa / 10^scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Decimal {
    negative: bool,
    mantissa: u128,
    scale: u32,
}

impl Decimal {
    fn rescaled(self, scale: u32) -> u128 {
        self.mantissa * 10u128.pow(scale - self.scale)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: Decimal,
    key_quote: Option<char>,
    value_quote: Option<char>,
    percent: bool,
}

/// A balanced `{...}` block whose contents are a list of key: number pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<'a> {
    pub block: &'a str,
    /// Byte offset of the block in the input.
    pub start: usize,
    /// Whether anything other than whitespace surrounds the block.
    pub with_prose: bool,
    entries: Vec<Entry>,
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.s[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat_quote(&mut self) -> Option<char> {
        let c = self.peek().filter(|c| QUOTES.contains(c))?;
        self.bump();
        Some(c)
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        &self.s[start..self.pos]
    }
}

fn parse_key(cur: &mut Cursor) -> Option<(String, Option<char>)> {
    cur.skip_ws();
    if let Some(q) = cur.eat_quote() {
        let start = cur.pos;
        loop {
            let c = cur.peek()?;
            if QUOTES.contains(&c) {
                let key = cur.s[start..cur.pos].trim().to_string();
                cur.bump();
                return (!key.is_empty()).then_some((key, Some(q)));
            }
            if c == '{' || c == '}' || c == '\n' {
                return None;
            }
            cur.bump();
        }
    }
    let start = cur.pos;
    while let Some(c) = cur.peek() {
        if is_colon(c) {
            break;
        }
        if c == '{' || c == '}' || is_comma(c) || c == '\n' || QUOTES.contains(&c) {
            return None;
        }
        cur.bump();
    }
    let key = cur.s[start..cur.pos].trim().to_string();
    (!key.is_empty()).then_some((key, None))
}

fn parse_value(cur: &mut Cursor) -> Option<(Decimal, Option<char>, bool)> {
    cur.skip_ws();
    let quote = cur.eat_quote();
    cur.skip_ws();
    let negative = match cur.peek() {
        Some('-') | Some('−') => {
            cur.bump();
            true
        }
        Some('+') => {
            cur.bump();
            false
        }
        _ => false,
    };
    let int = cur.digits();
    let mut frac = "";
    match cur.peek() {
        Some('.') => {
            cur.bump();
            frac = cur.digits();
        }
        // decimal comma only when digits follow and then a percent sign or quote
        Some(c) if is_comma(c) && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
            let save = cur.pos;
            cur.bump();
            let f = cur.digits();
            let mut probe = Cursor { s: cur.s, pos: cur.pos };
            probe.skip_ws();
            if probe.peek().is_some_and(|c| is_percent(c) || QUOTES.contains(&c)) {
                frac = f;
            } else {
                cur.pos = save;
            }
        }
        _ => {}
    }
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    // bound the size so the exact sum fits comfortably in u128
    if int.len() > 12 || frac.len() > 12 {
        return None;
    }
    let mantissa: u128 = format!("{int}{frac}").parse().ok()?;
    cur.skip_ws();
    let percent = cur.peek().is_some_and(is_percent);
    if percent {
        cur.bump();
        cur.skip_ws();
    }
    if quote.is_some() {
        cur.eat_quote()?;
    }
    Some((Decimal { negative, mantissa, scale: frac.len() as u32 }, quote, percent))
}

/// Parses the inside of a block; `None` unless it is entirely key: number
/// pairs (at least one), separated by commas.
fn parse_entries(inner: &str) -> Option<Vec<Entry>> {
    let mut cur = Cursor { s: inner, pos: 0 };
    let mut out = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        let (key, key_quote) = parse_key(&mut cur)?;
        cur.skip_ws();
        if !cur.bump().is_some_and(is_colon) {
            return None;
        }
        let (value, value_quote, percent) = parse_value(&mut cur)?;
        out.push(Entry { key, value, key_quote, value_quote, percent });
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(c) if is_comma(c) => {
                cur.bump();
            }
            Some(_) => return None,
        }
    }
    (!out.is_empty()).then_some(out)
}

/// The first balanced `{...}` block made of key: number pairs.
pub fn extract_candidate(text: &str) -> Result<Candidate<'_>, ParseFailure> {
    if text.trim().is_empty() {
        return Err(ParseFailure::new(FailureKind::Empty, text));
    }
    for (start, c) in text.char_indices() {
        if c != '{' {
            continue;
        }
        let mut depth = 0usize;
        let mut end = None;
        for (i, ch) in text[start..].char_indices() {
            match ch {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(start + i + 1);
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some(end) = end else { continue };
        let block = &text[start..end];
        if let Some(entries) = parse_entries(&block[1..block.len() - 1]) {
            let with_prose = !text[..start].trim().is_empty() || !text[end..].trim().is_empty();
            return Ok(Candidate { block, start, with_prose, entries });
        }
    }
    Err(ParseFailure::new(FailureKind::NoCandidateFound, text))
}

/// Parses a verbalized distribution for `question`. Percentages whose sum is
/// within `tolerance` points of 100 are renormalized to sum to 1.
pub fn parse_verbalized(
    text: &str,
    question: &Question,
    tolerance: f64,
) -> Result<ParsedDistribution, ParseFailure> {
    let cand = extract_candidate(text)?;
    let fail = |kind| ParseFailure::new(kind, cand.block);

    let mut slots: Vec<Option<Decimal>> = vec![None; question.scale_size()];
    let mut seen = BTreeSet::new();
    for e in &cand.entries {
        if question.key_index(&e.key).is_none() {
            return Err(fail(FailureKind::InvalidKeys));
        }
    }
    for e in &cand.entries {
        if !seen.insert(e.key.as_str()) {
            return Err(fail(FailureKind::DuplicateKeys));
        }
        slots[question.key_index(&e.key).expect("checked above")] = Some(e.value);
    }
    if cand.entries.iter().any(|e| e.value.negative && e.value.mantissa > 0) {
        return Err(fail(FailureKind::NegativeValue));
    }

    let scale = cand.entries.iter().map(|e| e.value.scale).max().unwrap_or(0);
    let values: Vec<u128> = slots.iter().map(|s| s.map_or(0, |d| d.rescaled(scale))).collect();
    let sum: u128 = values.iter().sum();
    let unit = 10f64.powi(scale as i32);
    let raw_sum = sum as f64 / unit;
    if sum == 0 || (raw_sum - 100.0).abs() > tolerance {
        return Err(fail(FailureKind::SumOutOfTolerance));
    }

    let mut repairs = Vec::new();
    if cand.entries.iter().any(|e| e.key_quote != Some('\'') || e.value_quote != Some('\'')) {
        repairs.push(Repair::QuoteVariant);
    }
    if cand.entries.iter().any(|e| !e.percent) {
        repairs.push(Repair::MissingPercentSign);
    }
    if slots.iter().any(Option::is_none) {
        repairs.push(Repair::MissingKeyZeroFilled);
    }
    if sum != 100 * 10u128.pow(scale) {
        repairs.push(Repair::Renormalized);
    }
    if cand.with_prose {
        repairs.push(Repair::ExtractedFromProse);
    }

    let total = sum as f64;
    let probs = values.iter().map(|&v| v as f64 / total).collect();
    let probs = OpinionDistribution::new(question.id.clone(), probs)
        .map_err(|_| fail(FailureKind::SumOutOfTolerance))?;
    Ok(ParsedDistribution { probs, raw_sum, repairs })
}
