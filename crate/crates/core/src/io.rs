//! On-disk JSON formats shared by the CLI and the fixtures.
//!
//! A matrix is `{ "blocks": [ { "dim": d, "re": [[...]], "im": [[...]] } ] }`
//! with row-major entries; a weight wraps its density as
//! `{ "density": <matrix> }`; a word file holds labeled letter lists.

use crate::algebra::{AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::gns::{PoissonWord, WordKind};
use crate::linalg::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub blocks: Vec<BlockJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightJson {
    pub density: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WordJson {
    /// "lambda", "empty", or "fock"
    #[serde(default = "default_kind")]
    pub kind: String,
    pub letters: Vec<MatrixJson>,
}

fn default_kind() -> String {
    "empty".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WordsFileJson {
    pub words: Vec<WordJson>,
}

impl MatrixJson {
    pub fn from_element(x: &AlgebraElement<f64>) -> Self {
        let blocks = x
            .blocks
            .iter()
            .map(|m| {
                let d = m.dim();
                let mut re = vec![vec![0.0; d]; d];
                let mut im = vec![vec![0.0; d]; d];
                for i in 0..d {
                    for j in 0..d {
                        re[i][j] = m[(i, j)].re;
                        im[i][j] = m[(i, j)].im;
                    }
                }
                BlockJson { dim: d, re, im }
            })
            .collect();
        MatrixJson { blocks }
    }

    pub fn to_element(&self) -> Result<AlgebraElement<f64>> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            if b.re.len() != b.dim
                || b.im.len() != b.dim
                || b.re.iter().chain(&b.im).any(|row| row.len() != b.dim)
            {
                return Err(Error::DimensionMismatch(format!(
                    "block declares dim {} but rows disagree",
                    b.dim
                )));
            }
            let mut m = Mat::zeros(b.dim);
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m[(i, j)] = Complex64::new(b.re[i][j], b.im[i][j]);
                }
            }
            blocks.push(m);
        }
        Ok(AlgebraElement::from_blocks(blocks))
    }
}

impl WeightJson {
    pub fn from_weight(w: &Weight<f64>) -> Self {
        WeightJson { density: MatrixJson::from_element(w.density()) }
    }

    pub fn to_weight(&self) -> Result<Weight<f64>> {
        Weight::new(self.density.to_element()?)
    }
}

pub fn parse_word_kind(kind: &str) -> Result<WordKind> {
    match kind {
        "lambda" => Ok(WordKind::Lambda),
        "empty" => Ok(WordKind::LambdaEmpty),
        "fock" => Ok(WordKind::LambdaEmptyEmpty),
        other => Err(Error::OutOfRange(format!(
            "unknown word kind {other:?} (expected lambda|empty|fock)"
        ))),
    }
}

impl WordJson {
    pub fn from_word(word: &PoissonWord<f64>) -> Self {
        let kind = match word.kind {
            WordKind::Lambda => "lambda",
            WordKind::LambdaEmpty => "empty",
            WordKind::LambdaEmptyEmpty => "fock",
        };
        WordJson {
            kind: kind.into(),
            letters: word.letters.iter().map(MatrixJson::from_element).collect(),
        }
    }

    pub fn to_word(&self, kind_override: Option<WordKind>) -> Result<PoissonWord<f64>> {
        let kind = match kind_override {
            Some(k) => k,
            None => parse_word_kind(&self.kind)?,
        };
        let letters = self.letters.iter().map(|m| m.to_element()).collect::<Result<Vec<_>>>()?;
        PoissonWord::new(kind, letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    #[test]
    fn weight_json_round_trip() {
        let mut next = rng_stream(601);
        let alg = crate::algebra::Algebra::new(vec![2, 1]).unwrap();
        let w = random_weight(&alg, 1.3, &mut next);
        let json = serde_json::to_string(&WeightJson::from_weight(&w)).unwrap();
        let back: WeightJson = serde_json::from_str(&json).unwrap();
        let w2 = back.to_weight().unwrap();
        assert!(w.density().sub(w2.density()).max_abs() < 1e-15);
    }

    #[test]
    fn malformed_blocks_rejected() {
        let bad = MatrixJson {
            blocks: vec![BlockJson { dim: 2, re: vec![vec![1.0, 0.0]], im: vec![vec![0.0, 0.0]] }],
        };
        assert!(bad.to_element().is_err());
        assert!(parse_word_kind("nope").is_err());
    }

    proptest! {
        #[test]
        fn element_json_round_trip(seed in 0u64..200) {
            let mut next = rng_stream(seed);
            let alg = crate::algebra::Algebra::new(vec![2, 2]).unwrap();
            let x = random_element(&alg, &mut next);
            let json = serde_json::to_string(&MatrixJson::from_element(&x)).unwrap();
            let back: MatrixJson = serde_json::from_str(&json).unwrap();
            let diff = back.to_element().unwrap().sub(&x).max_abs();
            prop_assert!(diff == 0.0, "diff {diff:e} json {json}");
        }
    }
}
