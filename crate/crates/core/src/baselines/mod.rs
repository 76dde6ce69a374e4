//! Classical comparison planners on the cell adjacency graph, each
//! instrumented with its search-space account.

mod apf;
mod search;

pub use apf::{apf_realtime, ApfParams, ApfResult};
pub use search::{astar, bfs_oracle, dijkstra, SearchResult};
