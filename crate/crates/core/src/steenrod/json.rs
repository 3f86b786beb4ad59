//! JSON forms of elements and tensors.

use serde::{Deserialize, Serialize};

use super::{Adm, Element, Gen, SteenrodAlgebra, SteenrodError, Tensor, Word};
use crate::scalar::{Base, Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenJson {
    Beta { beta: bool },
    P {
        #[serde(rename = "P")]
        p: u32,
    },
}

impl GenJson {
    pub fn from_gen(g: Gen) -> Self {
        match g {
            Gen::Beta => GenJson::Beta { beta: true },
            Gen::P(i) => GenJson::P { p: i },
        }
    }

    pub fn to_gen(&self) -> Result<Gen, SteenrodError> {
        match self {
            GenJson::Beta { beta: true } => Ok(Gen::Beta),
            GenJson::Beta { beta: false } => Err(SteenrodError::Parse("\"beta\": false is not a generator".into())),
            GenJson::P { p } => Ok(Gen::P(*p)),
        }
    }
}

pub fn word_to_json(w: &[Gen]) -> Vec<GenJson> {
    w.iter().map(|&g| GenJson::from_gen(g)).collect()
}

pub fn word_from_json(w: &[GenJson]) -> Result<Word, SteenrodError> {
    w.iter().map(GenJson::to_gen).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: Vec<u32>,
    pub word: Vec<GenJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub p: u32,
    pub base: Base,
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    pub fn from_element(e: &Element) -> Self {
        let r = e.ring();
        ElementJson {
            p: r.p(),
            base: r.base,
            terms: e
                .terms()
                .iter()
                .map(|(a, c)| TermJson {
                    coeff: c.coeffs().to_vec(),
                    word: word_to_json(&a.to_word()),
                })
                .collect(),
        }
    }

    pub fn ring(&self) -> Result<Ring, SteenrodError> {
        Ok(Ring::new(self.p, self.base)?)
    }

    /// Reads the terms (which need not be admissible) and reduces them in `alg`.
    pub fn to_element(&self, alg: &SteenrodAlgebra) -> Result<Element, SteenrodError> {
        let r = self.ring()?;
        if r != alg.ring() {
            return Err(SteenrodError::Mismatch(format!(
                "JSON element has p={} base={}, engine has p={} base={}",
                self.p,
                self.base,
                alg.p(),
                alg.ring().base
            )));
        }
        let mut terms: Vec<(Word, Scalar)> = Vec::new();
        for t in &self.terms {
            terms.push((word_from_json(&t.word)?, r.from_digits(&t.coeff)?));
        }
        Ok(alg.adem_reduce(&terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub coeff: Vec<u32>,
    pub left: Vec<GenJson>,
    pub right: Vec<GenJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub p: u32,
    pub base: Base,
    pub terms: Vec<TensorTermJson>,
}

impl TensorJson {
    pub fn from_tensor(t: &Tensor) -> Self {
        let r = t.ring();
        TensorJson {
            p: r.p(),
            base: r.base,
            terms: t
                .terms()
                .iter()
                .map(|((a, b), c)| TensorTermJson {
                    coeff: c.coeffs().to_vec(),
                    left: word_to_json(&a.to_word()),
                    right: word_to_json(&b.to_word()),
                })
                .collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<Tensor, SteenrodError> {
        let r = Ring::new(self.p, self.base)?;
        let mut t = Tensor::zero(r);
        for term in &self.terms {
            let l = word_from_json(&term.left)?;
            let rt = word_from_json(&term.right)?;
            let la = Adm::from_word(&l, self.p)
                .ok_or_else(|| SteenrodError::Parse(format!("left factor {l:?} is not admissible")))?;
            let ra = Adm::from_word(&rt, self.p)
                .ok_or_else(|| SteenrodError::Parse(format!("right factor {rt:?} is not admissible")))?;
            t.add_term(la, ra, r.from_digits(&term.coeff)?);
        }
        Ok(t)
    }
}
