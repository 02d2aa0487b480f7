//! Named inputs of the form `name` or `name:key=value,key=value`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqrd::qcore::linalg::{self, CVec};
use vqrd::qcore::{objects, random, DensityMatrix};
use vqrd::{Result, VqrdError};

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    params: BTreeMap<String, f64>,
}

impl Preset {
    pub fn parse(text: &str) -> Result<Self> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n, r),
            None => (text, ""),
        };
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| VqrdError::InvalidInput(format!("preset parameter `{item}` is not key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| VqrdError::InvalidInput(format!("preset parameter `{item}` is not a number")))?;
            params.insert(k.trim().to_ascii_lowercase(), v);
        }
        Ok(Self { name: name.trim().to_ascii_lowercase(), params })
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<f64> {
        self.params.get(key).copied().ok_or_else(|| VqrdError::InvalidInput(format!("preset `{}` needs `{key}=`", self.name)))
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v < 0.0 || v.fract() != 0.0 {
            return Err(VqrdError::InvalidInput(format!("`{key}` must be a nonnegative integer, got {v}")));
        }
        Ok(v as usize)
    }

    pub fn seed(&self) -> Result<u64> {
        Ok(self.usize("seed", 0)? as u64)
    }

    fn unknown(&self, theory: &str) -> VqrdError {
        VqrdError::InvalidInput(format!("unknown {theory} preset `{}`", self.name))
    }
}

/// `[[a, β], [β, 1 − a]]`.
pub fn qubit(a: f64, beta: f64) -> Result<DensityMatrix> {
    DensityMatrix::new(linalg::from_real(2, &[a, beta, beta, 1.0 - a]))
}

pub fn coherence_state(p: &Preset) -> Result<DensityMatrix> {
    match p.name.as_str() {
        "qubit" => qubit(p.get("a", 0.5), p.require("beta")?),
        "plus" => Ok(objects::plus_state()),
        "basis" => Ok(DensityMatrix::basis(p.usize("dim", 2)?, p.usize("k", 0)?)),
        "random" => {
            let d = p.usize("dim", 2)?;
            Ok(random::density(&mut ChaCha8Rng::seed_from_u64(p.seed()?), d, p.usize("rank", d)?))
        }
        _ => Err(p.unknown("coherence")),
    }
}

/// What an entanglement preset knows in closed form.
pub enum EntanglementClosed {
    Isotropic { alpha: f64, k: usize },
    Pure(vqrd::qcore::SchmidtVector),
    None,
}

pub struct EntanglementInput {
    pub state: DensityMatrix,
    pub dims: (usize, usize),
    pub closed: EntanglementClosed,
}

pub fn entanglement_state(p: &Preset) -> Result<EntanglementInput> {
    let two = (2, 2);
    let pure = |v: CVec| -> Result<EntanglementInput> {
        let s = vqrd::qcore::schmidt_of_vector(&v, two)?;
        Ok(EntanglementInput { state: DensityMatrix::pure(&v)?, dims: two, closed: EntanglementClosed::Pure(s) })
    };
    match p.name.as_str() {
        "isotropic" => {
            let (alpha, k) = (p.require("alpha")?, p.usize("k", 1)?);
            let d = 1usize << k;
            Ok(EntanglementInput { state: objects::isotropic(alpha, k)?, dims: (d, d), closed: EntanglementClosed::Isotropic { alpha, k } })
        }
        "bell" => Ok(EntanglementInput { state: objects::bell(), dims: two, closed: EntanglementClosed::Isotropic { alpha: 0.0, k: 1 } }),
        "pure" => {
            let s = p.require("s")?;
            if !(0.0..=1.0).contains(&s) {
                return Err(VqrdError::OutOfRange(format!("s = {s} outside [0, 1]")));
            }
            pure(CVec::from_vec(vec![linalg::cr(s.sqrt()), linalg::cr(0.0), linalg::cr(0.0), linalg::cr((1.0 - s).sqrt())]))
        }
        "product" => pure(objects::basis_vector(4, 0)),
        "randompure" => pure(random::pure_vector(&mut ChaCha8Rng::seed_from_u64(p.seed()?), 4)),
        "random" => {
            let state = random::density(&mut ChaCha8Rng::seed_from_u64(p.seed()?), 4, p.usize("rank", 4)?);
            Ok(EntanglementInput { state, dims: two, closed: EntanglementClosed::None })
        }
        _ => Err(p.unknown("entanglement")),
    }
}

pub struct MagicInput {
    pub state: DensityMatrix,
    /// Bloch length along the T axis when the state is a dephased T state.
    pub bloch: Option<f64>,
}

pub fn magic_state(p: &Preset) -> Result<MagicInput> {
    match p.name.as_str() {
        "dephasedt" => {
            let b = p.require("p")?;
            Ok(MagicInput { state: objects::dephased_t(b)?, bloch: Some(b) })
        }
        "t" => Ok(MagicInput { state: objects::t_state(), bloch: Some(1.0) }),
        "stabilizer" => Ok(MagicInput { state: DensityMatrix::basis(2, 0), bloch: None }),
        "strange" => {
            let q = p.get("q", 0.0);
            let state = objects::strange_state().mix(&DensityMatrix::maximally_mixed(3), q)?;
            Ok(MagicInput { state, bloch: None })
        }
        "qutritbasis" => Ok(MagicInput { state: DensityMatrix::basis(3, p.usize("k", 0)?), bloch: None }),
        _ => Err(p.unknown("magic")),
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ChannelClosed {
    Depolarizing { d: usize, p: f64 },
    Dephasing(f64),
    AmplitudeDamping(f64),
    Identity,
    None,
}

pub struct ChannelInput {
    pub channel: vqrd::qcore::ChoiOperator,
    pub closed: ChannelClosed,
}

pub fn channel(p: &Preset) -> Result<ChannelInput> {
    match p.name.as_str() {
        "depolarizing" => {
            let (d, q) = (p.usize("d", 2)?, p.require("p")?);
            Ok(ChannelInput { channel: objects::depolarizing(d, q)?, closed: ChannelClosed::Depolarizing { d, p: q } })
        }
        "dephasing" => {
            let q = p.require("p")?;
            Ok(ChannelInput { channel: objects::dephasing(q)?, closed: ChannelClosed::Dephasing(q) })
        }
        "amplitudedamping" => {
            let g = p.require("gamma")?;
            Ok(ChannelInput { channel: objects::amplitude_damping(g)?, closed: ChannelClosed::AmplitudeDamping(g) })
        }
        "replacement" => {
            let q = p.require("p")?;
            Ok(ChannelInput { channel: objects::replacement(q, &DensityMatrix::basis(2, 0))?, closed: ChannelClosed::None })
        }
        "identity" => Ok(ChannelInput { channel: vqrd::qcore::ChoiOperator::identity(p.usize("d", 2)?), closed: ChannelClosed::Identity }),
        _ => Err(p.unknown("channel")),
    }
}

/// `(L, p)` of the dephased comb.
pub fn comb(p: &Preset) -> Result<(usize, f64)> {
    match p.name.as_str() {
        "dephasing" | "comb" => Ok((p.usize("l", 1)?, p.require("p")?)),
        _ => Err(p.unknown("comb")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parameters() {
        let p = Preset::parse("isotropic:alpha=0.25,k=1").unwrap();
        assert_eq!(p.name, "isotropic");
        assert_eq!(p.get("alpha", 0.0), 0.25);
        assert_eq!(p.usize("k", 9).unwrap(), 1);
        assert_eq!(Preset::parse("plus").unwrap().name, "plus");
        assert!(Preset::parse("qubit:beta").is_err());
        assert!(Preset::parse("qubit:beta=x").is_err());
        assert!(Preset::parse("isotropic:k=1.5").unwrap().usize("k", 1).is_err());
    }
}
