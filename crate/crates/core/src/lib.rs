pub mod campaign;
pub mod circle;
pub mod config;
pub mod error;
pub mod factor;
pub mod gen;
pub mod io;
pub mod numetric;
pub mod polyalg;
pub mod polymat;
pub mod robust;
pub mod tfm;
pub mod toeplitz;

pub use config::NumericConfig;
pub use error::{Error, Result};
