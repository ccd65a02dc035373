//! Model snapshots: a short text header followed by the four parameter
//! vectors as little-endian `f64`.
//!
//! ```text
//! ranslice-checkpoint 1
//! model global
//! round 3
//! seed 0
//! f_max 0.3
//! config_digest 5f1c...
//! actor 10:64:relu 64:48:relu 48:5:sigmoid
//! critic 15:64:relu 64:48:relu 48:1:identity
//! lengths 4101 4209 4101 4209
//! end
//! <binary>
//! ```

use std::path::Path;

use crate::ddpg::{FlatModel, Policy};
use crate::error::{Error, Result};
use crate::nn::{spec_param_count, Activation, LayerSpec, NetParams};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "ranslice-checkpoint";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    /// Label such as `global` or `mvno-2`.
    pub model: String,
    /// Communication round that produced the parameters (1-based).
    pub round: usize,
    pub seed: u64,
    pub f_max: f64,
    pub config_digest: String,
    pub actor_spec: Vec<LayerSpec>,
    pub critic_spec: Vec<LayerSpec>,
    pub payload: FlatModel,
}

fn format_spec(spec: &[LayerSpec]) -> String {
    spec.iter()
        .map(|l| format!("{}:{}:{}", l.in_dim, l.out_dim, l.activation.as_str()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_spec(text: &str) -> Option<Vec<LayerSpec>> {
    text.split_whitespace()
        .map(|layer| {
            let mut it = layer.split(':');
            let in_dim = it.next()?.parse().ok()?;
            let out_dim = it.next()?.parse().ok()?;
            let activation = Activation::parse(it.next()?)?;
            it.next().is_none().then_some(LayerSpec::new(in_dim, out_dim, activation))
        })
        .collect()
}

impl Checkpoint {
    /// Checks the payload against the declared architecture.
    pub fn validate(&self) -> Result<()> {
        let want = [
            spec_param_count(&self.actor_spec),
            spec_param_count(&self.critic_spec),
            spec_param_count(&self.actor_spec),
            spec_param_count(&self.critic_spec),
        ];
        if self.payload.lengths() != want {
            return Err(Error::contract(format!(
                "payload lengths {:?} do not match architecture {:?}",
                self.payload.lengths(),
                want
            )));
        }
        if self.model.is_empty() || self.model.contains(char::is_whitespace) {
            return Err(Error::contract("model label must be a non-empty word"));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let lengths = self.payload.lengths().map(|n| n.to_string()).join(" ");
        let header = format!(
            "{MAGIC} {FORMAT_VERSION}\nmodel {}\nround {}\nseed {}\nf_max {}\nconfig_digest {}\nactor {}\ncritic {}\nlengths {lengths}\nend\n",
            self.model,
            self.round,
            self.seed,
            self.f_max,
            self.config_digest,
            format_spec(&self.actor_spec),
            format_spec(&self.critic_spec),
        );
        let mut out = header.into_bytes();
        for part in self.payload.parts() {
            for v in part {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        const FIELDS: [&str; 9] = [
            "model",
            "round",
            "seed",
            "f_max",
            "config_digest",
            "actor",
            "critic",
            "lengths",
            "end",
        ];
        let mut pos = 0;
        let mut next_line = || -> std::result::Result<&str, String> {
            let rest = &bytes[pos..];
            let nl = rest.iter().position(|&b| b == b'\n').ok_or("truncated header")?;
            pos += nl + 1;
            std::str::from_utf8(&rest[..nl]).map_err(|_| "header is not UTF-8".to_string())
        };

        let first = next_line()?;
        let version = first
            .strip_prefix(MAGIC)
            .map(str::trim)
            .ok_or("not a checkpoint file")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(format!("unsupported format version {version}"));
        }
        let mut values = Vec::with_capacity(FIELDS.len());
        for key in FIELDS {
            let line = next_line()?;
            let (k, v) = line.split_once(' ').unwrap_or((line, ""));
            if k != key {
                return Err(format!("expected `{key}`, found `{k}`"));
            }
            values.push(v.to_string());
        }
        let bad = |field: &str| format!("malformed `{field}`");
        let round = values[1].parse().map_err(|_| bad("round"))?;
        let seed = values[2].parse().map_err(|_| bad("seed"))?;
        let f_max = values[3].parse().map_err(|_| bad("f_max"))?;
        let actor_spec = parse_spec(&values[5]).ok_or_else(|| bad("actor"))?;
        let critic_spec = parse_spec(&values[6]).ok_or_else(|| bad("critic"))?;
        let lengths: Vec<usize> = values[7]
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("lengths"))?;
        if lengths.len() != 4 {
            return Err(bad("lengths"));
        }

        let body = &bytes[pos..];
        let total: usize = lengths.iter().sum();
        if body.len() != total * 8 {
            return Err(format!("expected {} payload bytes, found {}", total * 8, body.len()));
        }
        let mut floats = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
        let mut take = |n: usize| floats.by_ref().take(n).collect::<Vec<f64>>();
        let payload = FlatModel {
            actor: take(lengths[0]),
            critic: take(lengths[1]),
            actor_target: take(lengths[2]),
            critic_target: take(lengths[3]),
        };
        let ckpt = Checkpoint {
            model: values[0].clone(),
            round,
            seed,
            f_max,
            config_digest: values[4].clone(),
            actor_spec,
            critic_spec,
            payload,
        };
        ckpt.validate().map_err(|e| e.to_string())?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::Checkpoint {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_bytes(&bytes).map_err(|reason| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        })
    }

    /// Greedy policy from the stored actor.
    pub fn policy(&self) -> Result<Policy> {
        Ok(Policy {
            actor: NetParams::unflatten(&self.actor_spec, &self.payload.actor)?,
            f_max: self.f_max,
        })
    }

    /// Human-readable header summary.
    pub fn describe(&self) -> String {
        let [a, c, at, ct] = self.payload.lengths();
        format!(
            "format      {FORMAT_VERSION}\nmodel       {}\nround       {}\nseed        {}\nf_max       {}\nconfig      {}\nactor       {}\ncritic      {}\nparameters  actor {a}, critic {c}, actor_target {at}, critic_target {ct}\n",
            self.model,
            self.round,
            self.seed,
            self.f_max,
            self.config_digest,
            format_spec(&self.actor_spec),
            format_spec(&self.critic_spec),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddpg::{AgentConfig, AgentParams};
    use crate::seed::{rng_for, Stream};

    fn sample() -> Checkpoint {
        let cfg = AgentConfig {
            hidden: vec![6, 4],
            ..AgentConfig::default()
        };
        let params = AgentParams::init(&cfg, 5, &mut rng_for(1, Stream::Init)).unwrap();
        Checkpoint {
            model: "global".into(),
            round: 2,
            seed: 1,
            f_max: 0.3,
            config_digest: "abc123".into(),
            actor_spec: cfg.actor_spec(5),
            critic_spec: cfg.critic_spec(5),
            payload: params.flatten(),
        }
    }

    #[test]
    fn bytes_round_trip_exactly() {
        let ck = sample();
        let bytes = ck.to_bytes().unwrap();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes().unwrap(), bytes);
    }

    #[test]
    fn corrupt_files_rejected() {
        let bytes = sample().to_bytes().unwrap();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 8]).is_err());
        let mut wrong_version = bytes.clone();
        let at = MAGIC.len() + 1;
        wrong_version[at] = b'9';
        assert!(Checkpoint::from_bytes(&wrong_version).unwrap_err().contains("version"));
        assert!(Checkpoint::from_bytes(b"hello\n").is_err());
    }

    #[test]
    fn mismatched_payload_is_invalid() {
        let mut ck = sample();
        ck.payload.critic.pop();
        assert!(ck.to_bytes().is_err());
    }
}
