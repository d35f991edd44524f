use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{moving_average, LearnerConfig, LearnerState, MAE_WINDOW};
use crate::eval::{FeatureCatalogue, FeatureVector, NUM_FEATURES};

pub const PROFILE_FORMAT: &str = "chess-style-profile/1";

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("reading profile: {0}")]
    Io(#[from] std::io::Error),
    #[error("profile is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unsupported profile format {0:?}")]
    Format(String),
    #[error("profile weight {index} is {found:?}, the catalogue expects {expected:?}")]
    FeatureMismatch { index: usize, found: String, expected: String },
    #[error("profile has {0} weights, expected {NUM_FEATURES}")]
    Count(usize),
    #[error(transparent)]
    Weights(#[from] crate::eval::EvalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub games: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_mae: Option<f64>,
    /// Mean MAE of the last 50 games.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_mae_moving_average: Option<f64>,
}

/// A trained (or hand-built) weight vector with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleProfile {
    pub player_name: String,
    pub catalogue_hash: String,
    pub weights: FeatureVector,
    pub training: TrainingSummary,
    pub config: LearnerConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedWeight {
    id: String,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    format: String,
    player: String,
    catalogue_version: u32,
    catalogue_hash: String,
    seed: u64,
    config_hash: String,
    training: TrainingSummary,
    config: LearnerConfig,
    weights: Vec<NamedWeight>,
}

/// First 16 hex digits of the SHA-256 of a value's TOML form.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let text = toml::to_string(value).expect("configuration serializes");
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

impl StyleProfile {
    /// An untrained profile with the given weights.
    pub fn new(player: &str, weights: FeatureVector) -> Self {
        StyleProfile {
            player_name: player.to_string(),
            catalogue_hash: FeatureCatalogue::standard_hash().to_string(),
            weights,
            training: TrainingSummary { games: 0, samples: 0, mean_mae: None, final_mae_moving_average: None },
            config: LearnerConfig::default(),
        }
    }

    pub fn from_state(player: &str, state: &LearnerState, cfg: &LearnerConfig) -> Self {
        let h = &state.mae_history;
        let mean_mae = (!h.is_empty()).then(|| h.iter().sum::<f64>() / h.len() as f64);
        let final_ma = moving_average(h, MAE_WINDOW).last().copied();
        StyleProfile {
            player_name: player.to_string(),
            catalogue_hash: FeatureCatalogue::standard_hash().to_string(),
            weights: state.weights,
            training: TrainingSummary {
                games: state.games_seen,
                samples: state.samples_seen,
                mean_mae,
                final_mae_moving_average: final_ma,
            },
            config: cfg.clone(),
        }
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.config)
    }

    pub fn to_toml(&self) -> String {
        let catalogue = FeatureCatalogue::standard();
        let file = ProfileFile {
            format: PROFILE_FORMAT.to_string(),
            player: self.player_name.clone(),
            catalogue_version: catalogue.version,
            catalogue_hash: self.catalogue_hash.clone(),
            seed: self.config.rng_seed,
            config_hash: self.config_hash(),
            training: self.training.clone(),
            config: self.config.clone(),
            weights: catalogue
                .features
                .iter()
                .zip(self.weights.as_slice())
                .map(|(f, &weight)| NamedWeight { id: f.id.clone(), weight })
                .collect(),
        };
        toml::to_string(&file).expect("profile serializes")
    }

    /// Parses a profile. The weights must name the standard catalogue's
    /// features in order; the stored catalogue hash is kept as written so
    /// callers can refuse to compare profiles from different catalogues.
    pub fn from_toml(text: &str) -> Result<Self, ProfileError> {
        let file: ProfileFile = toml::from_str(text)?;
        if file.format != PROFILE_FORMAT {
            return Err(ProfileError::Format(file.format));
        }
        if file.weights.len() != NUM_FEATURES {
            return Err(ProfileError::Count(file.weights.len()));
        }
        let catalogue = FeatureCatalogue::standard();
        for (index, (w, f)) in file.weights.iter().zip(&catalogue.features).enumerate() {
            if w.id != f.id {
                return Err(ProfileError::FeatureMismatch { index, found: w.id.clone(), expected: f.id.clone() });
            }
        }
        let values: Vec<f64> = file.weights.iter().map(|w| w.weight).collect();
        Ok(StyleProfile {
            player_name: file.player,
            catalogue_hash: file.catalogue_hash,
            weights: FeatureVector::from_slice(&values)?,
            training: file.training,
            config: file.config,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProfileError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// True when the profile was trained against this build's catalogue.
    pub fn matches_catalogue(&self) -> bool {
        self.catalogue_hash == FeatureCatalogue::standard_hash()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut w = [1.0; NUM_FEATURES];
        w[17] = 0.25;
        w[100] = 1.0 / 3.0;
        let p = StyleProfile::new("Some Player", FeatureVector::new(w).unwrap());
        let text = p.to_toml();
        assert!(text.contains("id = \"material_balance\""));
        let back = StyleProfile::from_toml(&text).unwrap();
        assert_eq!(back, p);
        assert!(back.matches_catalogue());
    }

    #[test]
    fn rejects_renamed_feature() {
        let p = StyleProfile::new("x", FeatureVector::uniform());
        let text = p.to_toml().replacen("pseudo_mobility", "mobility", 1);
        assert!(matches!(StyleProfile::from_toml(&text), Err(ProfileError::FeatureMismatch { index: 1, .. })));
    }

    #[test]
    fn rejects_negative_weight() {
        let p = StyleProfile::new("x", FeatureVector::uniform());
        let text = p.to_toml();
        let i = text.find("id = \"bishop_pair\"\nweight = 1.0").unwrap();
        let mut bad = text.clone();
        bad.replace_range(i..i + "id = \"bishop_pair\"\nweight = 1.0".len(), "id = \"bishop_pair\"\nweight = -1.0");
        assert!(matches!(StyleProfile::from_toml(&bad), Err(ProfileError::Weights(_))));
    }
}
