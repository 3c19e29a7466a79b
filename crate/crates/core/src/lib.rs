pub mod cyclo;
pub mod error;
pub mod finfield;
pub mod flcheck;
pub mod fqlin;
pub mod localfield;
pub mod omat;
pub mod orbital;
pub mod rootdata;
pub mod series;
pub mod spectral;
pub mod springer;

pub use error::{Error, Result};
