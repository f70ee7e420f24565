pub mod analysis;
pub mod api;
pub mod db;
pub mod error;
pub mod fixture;
pub mod index;
pub mod model;
pub mod persistence;
pub mod registry;
pub mod resolution;
pub mod submission;
pub mod taxonomy;
pub mod views;

pub use db::Database;
pub use error::{Error, Result};
