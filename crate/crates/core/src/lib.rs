//! Object discovery by a naive agent.
//!
//! An agent with no model of itself or its world moves a small sensor over
//! a gridworld, stores every transition between salient sensory states as a
//! `(state, motor delta, state)` triplet, and re-checks each triplet after
//! every scene change. Sets of states whose mutual transitions keep holding
//! while the world changes around them are what the agent can call objects.
//!
//! * [`world`] builds and mutates scenes,
//! * [`agent`] reads the sensor and filters salient states,
//! * [`memory`] and [`explore`] run the exploration and keep the counts,
//! * [`spectral`] finds the object networks in the resulting matrix,
//! * [`runner`], [`config`], [`eval`] and [`output`] drive whole experiments.

pub mod agent;
pub mod config;
pub mod error;
pub mod eval;
pub mod explore;
pub mod grid;
pub mod matrix;
pub mod memory;
pub mod output;
pub mod rng;
pub mod runner;
pub mod spectral;
pub mod world;

pub use agent::{is_salient, motor_range, read_sensor, salient_positions, MotorConfig, SensorSpec, SensoryState};
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use eval::{evaluate_purity, label_states, GroundTruthLabel, PurityReport};
pub use explore::{explore_first_scene, replay, run_experiment, verify_scene, ExperimentOptions, ExperimentOutcome};
pub use grid::{Coord, Extent};
pub use matrix::Matrix;
pub use memory::{build_catalog, Memory, MotorMatrix, StateCatalog, TransitionRecord};
pub use rng::Streams;
pub use runner::{execute, run, run_sim1, run_sim2, Overrides, RunArtifacts};
pub use spectral::{
    build_similarity, eigendecompose_symmetric, estimate_k_eigengap, extract_objects_by_threshold, kmeans, reorder,
    spectral_cluster, spectral_embed, ClusterAssignment, Component,
};
pub use world::{generate_initial_scene, mutate_scene, GridObject, Scene, WorldSpec};
