use crate::sim::MazeAction;
use crate::vecenv::Env;

use super::{Agent, AgentResult};

/// Walks the unique tree path from the agent to the goal.
#[derive(Debug, Clone, Default)]
pub struct MazeBfsOracle {
    plan: Vec<MazeAction>,
    cursor: usize,
}

impl Agent for MazeBfsOracle {
    fn name(&self) -> &str {
        "bfs-oracle"
    }

    fn privileged(&self) -> bool {
        true
    }

    fn observes(&self) -> bool {
        false
    }

    fn reset(&mut self, env: Option<&Env>) -> AgentResult<()> {
        let Some(Env::Maze(e)) = env else {
            return Err("maze oracle needs a maze env".into());
        };
        let level = e.level();
        let path = level.path(e.state().agent, level.goal())?;
        self.plan = path
            .windows(2)
            .map(|w| MazeAction::between(w[0], w[1]).expect("path cells are adjacent"))
            .collect();
        self.cursor = 0;
        Ok(())
    }

    fn act(&mut self, _obs: &[u8], _env: Option<&Env>) -> AgentResult<u32> {
        let a = self
            .plan
            .get(self.cursor)
            .ok_or("maze oracle ran past the end of its plan")?;
        self.cursor += 1;
        Ok(a.index())
    }
}
