//! Probabilistic rulesets and their extended B/S notation.
//!
//! A [`Ruleset`] is two tables of nine probabilities indexed by the exact
//! number of living neighbours. The textual notation extends the conventional
//! `B3/S23` form with optional probabilities:
//!
//! ```text
//! ruleset := part "/" part          one part starts with 'B', the other 'S',
//!                                   either order; canonical order is B then S
//! part    := ('B'|'S') [entry ("," entry)*]
//! entry   := digit ':' prob | digit      digit in 0..8, prob a decimal in [0,1]
//! ```
//!
//! A count without a `:prob` suffix has probability 1; unlisted counts have
//! probability 0. Bare digit runs (`S23`) are accepted for compatibility with
//! the conventional notation; probabilities are maximal-munch, so after a
//! `:prob` entry the next entry starts at a comma or whitespace. Whitespace
//! around tokens is ignored. This notation is the only serialization of a
//! ruleset; CLI flags and config files both use it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of neighbour-count slots: 0 through 8 living neighbours.
pub const NEIGHBOR_COUNTS: usize = 9;

/// Survival and birth probability tables indexed by living-neighbour count.
///
/// Immutable after construction; every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ruleset {
    birth: [f64; NEIGHBOR_COUNTS],
    survive: [f64; NEIGHBOR_COUNTS],
}

/// A probability outside `[0, 1]` handed to [`Ruleset::new`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{category} probability for neighbour count {count} is {value}, outside [0, 1]")]
pub struct InvalidRuleProbability {
    pub category: &'static str,
    pub count: usize,
    pub value: f64,
}

impl Ruleset {
    /// Builds a ruleset from explicit tables, validating every entry.
    pub fn new(
        birth: [f64; NEIGHBOR_COUNTS],
        survive: [f64; NEIGHBOR_COUNTS],
    ) -> Result<Self, InvalidRuleProbability> {
        for (category, table) in [("birth", &birth), ("survival", &survive)] {
            for (count, &value) in table.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(InvalidRuleProbability {
                        category,
                        count,
                        value,
                    });
                }
            }
        }
        Ok(Self { birth, survive })
    }

    /// The ruleset that reproduces Conway's Game of Life exactly:
    /// `birth[3] = 1`, `survive[2] = survive[3] = 1`, everything else 0.
    pub fn classic_life() -> Self {
        let mut birth = [0.0; NEIGHBOR_COUNTS];
        birth[3] = 1.0;
        let mut survive = [0.0; NEIGHBOR_COUNTS];
        survive[2] = 1.0;
        survive[3] = 1.0;
        Self { birth, survive }
    }

    /// Probability that a dead cell with exactly `count` living neighbours is born.
    #[inline]
    pub fn birth(&self, count: usize) -> f64 {
        self.birth[count]
    }

    /// Probability that a living cell with exactly `count` living neighbours survives.
    #[inline]
    pub fn survival(&self, count: usize) -> f64 {
        self.survive[count]
    }

    pub fn birth_table(&self) -> &[f64; NEIGHBOR_COUNTS] {
        &self.birth
    }

    pub fn survival_table(&self) -> &[f64; NEIGHBOR_COUNTS] {
        &self.survive
    }

    /// True iff dead cells with zero living neighbours can come alive
    /// (`birth[0] > 0`). Under such a rule an empty grid repopulates
    /// immediately and can never stay empty for two consecutive generations.
    pub fn is_strobing(&self) -> bool {
        self.birth[0] > 0.0
    }
}

/// Canonical notation: B part then S part, counts ascending, `:1` suffixes
/// omitted, probabilities printed with the shortest decimal that round-trips.
impl fmt::Display for Ruleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B")?;
        write_entries(f, &self.birth)?;
        write!(f, "/S")?;
        write_entries(f, &self.survive)
    }
}

fn write_entries(f: &mut fmt::Formatter<'_>, table: &[f64; NEIGHBOR_COUNTS]) -> fmt::Result {
    let mut first = true;
    for (count, &p) in table.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if !first {
            write!(f, ",")?;
        }
        first = false;
        if p == 1.0 {
            write!(f, "{count}")?;
        } else {
            write!(f, "{count}:{p}")?;
        }
    }
    Ok(())
}

/// A syntax or range error in ruleset notation, with the character position
/// (0-based) where it was detected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleParseError {
    #[error("position {position}: expected a part starting with 'B' or 'S'")]
    ExpectedPart { position: usize },
    #[error("position {position}: duplicate '{part}' part")]
    DuplicatePart { position: usize, part: char },
    #[error("position {position}: expected '/' between the B and S parts")]
    ExpectedSlash { position: usize },
    #[error("position {position}: expected a neighbour count digit after ','")]
    ExpectedDigit { position: usize },
    #[error("position {position}: neighbour count 9 is out of range (counts run 0..8)")]
    CountOutOfRange { position: usize },
    #[error("position {position}: duplicate neighbour count {count} in the '{part}' part")]
    DuplicateCount {
        position: usize,
        count: u8,
        part: char,
    },
    #[error("position {position}: malformed probability")]
    MalformedProbability { position: usize },
    #[error("position {position}: probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { position: usize, value: f64 },
    #[error("position {position}: unexpected character '{found}'")]
    UnexpectedChar { position: usize, found: char },
    #[error("ruleset is missing the '{part}' part")]
    MissingPart { part: char },
}

impl FromStr for Ruleset {
    type Err = RuleParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut scanner = Scanner::new(text);
        let mut birth: Option<[f64; NEIGHBOR_COUNTS]> = None;
        let mut survive: Option<[f64; NEIGHBOR_COUNTS]> = None;

        scanner.skip_ws();
        parse_part(&mut scanner, &mut birth, &mut survive)?;
        scanner.skip_ws();
        match scanner.next() {
            Some('/') => {}
            _ => {
                return Err(RuleParseError::ExpectedSlash {
                    position: scanner.last_pos(),
                })
            }
        }
        scanner.skip_ws();
        parse_part(&mut scanner, &mut birth, &mut survive)?;
        scanner.skip_ws();
        if let Some(found) = scanner.peek() {
            return Err(RuleParseError::UnexpectedChar {
                position: scanner.pos(),
                found,
            });
        }

        let birth = birth.ok_or(RuleParseError::MissingPart { part: 'B' })?;
        let survive = survive.ok_or(RuleParseError::MissingPart { part: 'S' })?;
        Ok(Self { birth, survive })
    }
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
}

impl Scanner {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn pos(&self) -> usize {
        self.pos
    }

    /// Position of the character most recently consumed (or of EOF).
    fn last_pos(&self) -> usize {
        self.pos.saturating_sub(1).min(self.chars.len())
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }
}

fn parse_part(
    scanner: &mut Scanner,
    birth: &mut Option<[f64; NEIGHBOR_COUNTS]>,
    survive: &mut Option<[f64; NEIGHBOR_COUNTS]>,
) -> Result<(), RuleParseError> {
    let prefix_pos = scanner.pos();
    let prefix = match scanner.next() {
        Some(c @ ('B' | 'S')) => c,
        _ => return Err(RuleParseError::ExpectedPart {
            position: prefix_pos,
        }),
    };
    let slot = if prefix == 'B' { &mut *birth } else { &mut *survive };
    if slot.is_some() {
        return Err(RuleParseError::DuplicatePart {
            position: prefix_pos,
            part: prefix,
        });
    }

    let mut table = [0.0; NEIGHBOR_COUNTS];
    let mut seen = [false; NEIGHBOR_COUNTS + 1];
    scanner.skip_ws();
    loop {
        match scanner.peek() {
            Some(d) if d.is_ascii_digit() => {
                let digit_pos = scanner.pos();
                scanner.next();
                let count = (d as u8 - b'0') as usize;
                if count > 8 {
                    return Err(RuleParseError::CountOutOfRange {
                        position: digit_pos,
                    });
                }
                if seen[count] {
                    return Err(RuleParseError::DuplicateCount {
                        position: digit_pos,
                        count: count as u8,
                        part: prefix,
                    });
                }
                seen[count] = true;
                scanner.skip_ws();
                let prob = if scanner.peek() == Some(':') {
                    scanner.next();
                    scanner.skip_ws();
                    parse_probability(scanner)?
                } else {
                    1.0
                };
                table[count] = prob;
                scanner.skip_ws();
                if scanner.peek() == Some(',') {
                    scanner.next();
                    scanner.skip_ws();
                    if !matches!(scanner.peek(), Some(c) if c.is_ascii_digit()) {
                        return Err(RuleParseError::ExpectedDigit {
                            position: scanner.pos(),
                        });
                    }
                }
            }
            _ => break,
        }
    }
    *slot = Some(table);
    Ok(())
}

fn parse_probability(scanner: &mut Scanner) -> Result<f64, RuleParseError> {
    let start = scanner.pos();
    let mut digits = String::new();
    while matches!(scanner.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
        digits.push(scanner.next().unwrap());
    }
    if digits.is_empty() {
        return Err(RuleParseError::MalformedProbability { position: start });
    }
    let value: f64 = digits
        .parse()
        .map_err(|_| RuleParseError::MalformedProbability { position: start })?;
    if !(0.0..=1.0).contains(&value) {
        return Err(RuleParseError::ProbabilityOutOfRange {
            position: start,
            value,
        });
    }
    Ok(value)
}
