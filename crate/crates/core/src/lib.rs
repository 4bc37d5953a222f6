pub mod baseline;
pub mod delaunay;
pub mod error;
pub mod experiment;
pub mod export;
pub mod geom;
pub mod path;
mod predicates;
pub mod sampling;
pub mod stats;
pub mod walk;

pub use baseline::{Baseline, BaselineResult};
pub use delaunay::{DiscDomain, Location, SiteSet, Triangulation};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentRun, Instance, WalkOutcome};
pub use geom::{ConeFrame, Point2, Radius, TheoryConstants};
pub use path::{competitive_path, simple_path, Path};
pub use sampling::{sample_sites, ExperimentConfig, PathKinds, SamplingMode};
pub use stats::StatsTable;
pub use walk::{cone_walk, WalkTrace};
