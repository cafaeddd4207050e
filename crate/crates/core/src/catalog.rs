//! Built-in explicit codes, numbered 1 to 11.
//!
//! Each entry keeps its rows exactly as published, including three known
//! defects. Where the defect is a typo with an unambiguous fix, or where the
//! weight solver finds valid weights on the same support, a corrected code
//! is available next to the printed one.

use num_bigint::BigInt;

use crate::algebra::Rational;
use crate::code::{Code, Codeword, Row, Sign};
use crate::construct::{solve_unbalanced_weights, WeightSolveResult, WeightStatus};
use crate::criteria::{verify, Verification};
use crate::error::{Error, Result};
use crate::fock::OccupationVector;

pub const CATALOG_SIZE: u32 = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Defect {
    /// A QCS is listed twice; the fixed rows are stored with the entry.
    Typo,
    /// The printed weights break a criterion; repair goes through the
    /// weight solver on the printed support.
    Weights,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: u32,
    /// `[[N,m,2^k,d]]` as published.
    pub descriptor: &'static str,
    pub design_t: u32,
    /// Codeword rows as published, not validated.
    pub printed: Vec<Vec<Row>>,
    pub defect: Option<(Defect, &'static str)>,
    fixed_rows: Option<Vec<Vec<Row>>>,
}

impl CatalogEntry {
    pub fn name(&self) -> String {
        format!("example-{}", self.id)
    }

    pub fn is_flagged(&self) -> bool {
        self.defect.is_some()
    }

    pub fn supports(&self) -> Vec<Vec<OccupationVector>> {
        self.printed.iter().map(|rows| rows.iter().map(|r| r.qcs.clone()).collect()).collect()
    }

    /// The code exactly as published; fails when the rows are not a valid
    /// code (repeated QCS, weights not summing to 1).
    pub fn as_printed(&self) -> Result<Code> {
        build(&self.name(), self.design_t, &self.printed)
    }

    /// Weight solver run on the printed support, for entries whose weights
    /// are defective.
    pub fn repair(&self) -> Option<Result<WeightSolveResult>> {
        match self.defect {
            Some((Defect::Weights, _)) => Some(solve_unbalanced_weights(&self.supports(), self.design_t)),
            _ => None,
        }
    }

    /// The fixed code, when a fix exists.
    pub fn corrected(&self) -> Result<Option<Code>> {
        let name = format!("{}-corrected", self.name());
        if let Some(rows) = &self.fixed_rows {
            return build(&name, self.design_t, rows).map(Some);
        }
        match self.repair() {
            Some(Ok(res)) if res.status != WeightStatus::Infeasible => {
                res.to_code(&self.supports(), &name, self.design_t).map(Some)
            }
            Some(Err(e)) => Err(e),
            _ => Ok(None),
        }
    }

    /// The corrected code when there is one, otherwise the printed code.
    pub fn code(&self) -> Result<Code> {
        match self.corrected()? {
            Some(c) => Ok(c),
            None => self.as_printed(),
        }
    }
}

fn build(name: &str, t: u32, words: &[Vec<Row>]) -> Result<Code> {
    let codewords = words
        .iter()
        .enumerate()
        .map(|(i, rows)| Codeword::new(i, rows.clone()))
        .collect::<Result<Vec<_>>>()?;
    Code::new(name, t, codewords)
}

fn row(num: i64, den: i64, qcs: &[u32]) -> Row {
    Row::new(Rational::new(BigInt::from(num), BigInt::from(den)), Sign::Plus, qcs.to_vec())
}

fn uniform(qcs: &[&[u32]]) -> Vec<Row> {
    qcs.iter().map(|q| row(1, qcs.len() as i64, q)).collect()
}

pub fn catalog_entry(id: u32) -> Result<CatalogEntry> {
    let mut fixed_rows = None;
    let mut defect = None;
    let (descriptor, design_t, printed) = match id {
        1 => ("[[4,2,2,2]]", 1, vec![uniform(&[&[4, 0], &[0, 4]]), uniform(&[&[2, 2]])]),
        2 => {
            let mut words = vec![
                uniform(&[&[0, 0, 12], &[12, 0, 0], &[0, 12, 0]]),
                uniform(&[&[0, 2, 10], &[10, 0, 2], &[2, 10, 0]]),
                uniform(&[&[0, 4, 8], &[8, 0, 4], &[4, 8, 0]]),
                uniform(&[&[0, 6, 6], &[6, 0, 6], &[6, 6, 0]]),
                uniform(&[&[0, 8, 4], &[4, 0, 8], &[8, 4, 0]]),
                uniform(&[&[0, 10, 2], &[2, 0, 10], &[10, 2, 0]]),
                uniform(&[&[2, 2, 8], &[8, 2, 2], &[2, 8, 2]]),
                uniform(&[&[2, 4, 6], &[6, 2, 4], &[4, 6, 2]]),
                uniform(&[&[2, 6, 4], &[6, 4, 2], &[4, 2, 6]]),
                uniform(&[&[4, 4, 4]]),
            ];
            fixed_rows = Some(words.clone());
            words[8] = uniform(&[&[2, 6, 4], &[6, 4, 2], &[2, 6, 4]]);
            defect = Some((
                Defect::Typo,
                "codeword 9 lists |2,6,4⟩ twice; the cyclic orbit of (2,6,4) has |4,2,6⟩ as its third member",
            ));
            ("[[12,3,10,2]]", 1, words)
        }
        3 => (
            "[[6,3,4,2]]",
            1,
            vec![
                uniform(&[&[6, 0, 0], &[0, 6, 0], &[0, 0, 6]]),
                uniform(&[&[4, 2, 0], &[2, 0, 4], &[0, 4, 2]]),
                uniform(&[&[2, 4, 0], &[4, 0, 2], &[0, 2, 4]]),
                uniform(&[&[2, 2, 2]]),
            ],
        ),
        4 => (
            "[[9,3,2,3]]",
            2,
            vec![uniform(&[&[3, 0, 6], &[0, 6, 3], &[6, 3, 0]]), uniform(&[&[0, 3, 6], &[3, 6, 0], &[6, 0, 3]])],
        ),
        5 => (
            "[[6,4,2,2]]",
            1,
            vec![
                uniform(&[&[0, 3, 2, 1], &[1, 0, 3, 2], &[2, 1, 0, 3], &[3, 2, 1, 0]]),
                uniform(&[&[0, 1, 2, 3], &[1, 2, 3, 0], &[2, 3, 0, 1], &[3, 0, 1, 2]]),
            ],
        ),
        6 => ("[[7,2,2,2]]", 1, vec![uniform(&[&[7, 0], &[1, 6]]), uniform(&[&[5, 2], &[3, 4]])]),
        7 => (
            "[[9,2,2,3]]",
            2,
            vec![
                vec![row(1, 4, &[9, 0]), row(3, 4, &[3, 6])],
                vec![row(1, 4, &[0, 9]), row(3, 4, &[6, 3])],
            ],
        ),
        8 => (
            "[[9,3,2,3]]",
            2,
            vec![
                uniform(&[&[0, 3, 6], &[3, 0, 6], &[3, 6, 0]]),
                vec![row(6, 9, &[3, 3, 3]), row(2, 9, &[0, 0, 9]), row(1, 9, &[0, 9, 0])],
            ],
        ),
        9 => (
            "[[16,2,2,4]]",
            3,
            vec![
                vec![row(1, 8, &[0, 16]), row(1, 8, &[16, 0]), row(6, 8, &[8, 8])],
                uniform(&[&[4, 12], &[12, 4]]),
            ],
        ),
        10 => {
            defect = Some((
                Defect::Weights,
                "printed weights give the two codewords different first column moments",
            ));
            (
                "[[20,3,2,4]]",
                3,
                vec![
                    vec![row(1, 25, &[0, 4, 16]), row(4, 25, &[4, 0, 16]), row(20, 25, &[0, 20, 0])],
                    vec![row(2, 5, &[4, 4, 12]), row(3, 5, &[4, 8, 8])],
                ],
            )
        }
        11 => {
            defect = Some((Defect::Weights, "printed weights of codeword 0 sum to 89/90"));
            (
                "[[50,2,2,5]]",
                4,
                vec![
                    vec![row(1, 18, &[0, 50]), row(5, 9, &[20, 30]), row(1, 3, &[40, 10]), row(2, 45, &[45, 5])],
                    vec![
                        row(1, 18, &[5, 45]),
                        row(1, 6, &[10, 40]),
                        row(33, 90, &[25, 25]),
                        row(1, 3, &[35, 15]),
                        row(7, 90, &[50, 0]),
                    ],
                ],
            )
        }
        _ => return Err(Error::UnknownCatalogId(id)),
    };
    Ok(CatalogEntry { id, descriptor, design_t, printed, defect, fixed_rows })
}

pub fn catalog() -> Vec<CatalogEntry> {
    (1..=CATALOG_SIZE).map(|id| catalog_entry(id).expect("ids in range")).collect()
}

/// How an entry fares at its design `t`.
#[derive(Clone, Debug)]
pub struct EntryReport {
    pub id: u32,
    /// `Err` when the printed rows are not a valid code.
    pub printed: std::result::Result<Verification, Error>,
    pub corrected: Option<Verification>,
    pub repair: Option<Result<WeightSolveResult>>,
}

impl EntryReport {
    pub fn printed_corrects(&self) -> bool {
        self.printed.as_ref().is_ok_and(Verification::corrects)
    }

    pub fn corrected_corrects(&self) -> Option<bool> {
        self.corrected.as_ref().map(Verification::corrects)
    }
}

pub fn verify_entry(entry: &CatalogEntry) -> Result<EntryReport> {
    let printed = entry.as_printed().and_then(|c| verify(&c, entry.design_t));
    let corrected = match entry.corrected()? {
        Some(c) => Some(verify(&c, entry.design_t)?),
        None => None,
    };
    Ok(EntryReport { id: entry.id, printed, corrected, repair: entry.repair() })
}
