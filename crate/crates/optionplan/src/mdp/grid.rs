//! Grid-world construction and the text map format.
//!
//! Maps are lines of equal width over `#` (wall), `.` (floor), and `G`
//! (goal). States are floor cells in row-major order with the goal placed
//! last; actions are N, S, E, W in that order. Moving into a wall or the
//! boundary self-loops, and with slip probability `p` an action succeeds
//! with `1 - p` and self-loops with `p`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::mdp::Mdp;

/// Parameters for a rectangular grid world with a single goal cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub walls: BTreeSet<(usize, usize)>,
    /// (row, col) of the goal cell.
    pub goal: (usize, usize),
    pub move_reward: f64,
    pub goal_reward: f64,
    pub slip_probability: f64,
}

impl GridSpec {
    /// Open grid with the goal in the bottom-right corner and the default
    /// reward scheme (goal reward 1, move reward 0, no slip).
    pub fn open(width: usize, height: usize) -> Self {
        GridSpec {
            width,
            height,
            walls: BTreeSet::new(),
            goal: (height - 1, width - 1),
            move_reward: 0.0,
            goal_reward: 1.0,
            slip_probability: 0.0,
        }
    }
}

/// Cell-to-state bookkeeping for a grid MDP, used for rendering and for
/// mapping states back to coordinates.
#[derive(Debug, Clone)]
pub struct GridLayout {
    pub width: usize,
    pub height: usize,
    pub walls: BTreeSet<(usize, usize)>,
    pub goal_cell: (usize, usize),
    /// state index -> cell
    pub cell_of_state: Vec<(usize, usize)>,
    /// cell (row-major) -> state index, None for walls
    pub state_of_cell: Vec<Option<usize>>,
}

impl GridLayout {
    pub fn state_at(&self, row: usize, col: usize) -> Option<usize> {
        self.state_of_cell[row * self.width + col]
    }

    /// Render the grid with `B` marking the given initiation states and `G`
    /// the goal cell.
    pub fn render(&self, initiation_states: &[usize]) -> String {
        let marked: BTreeSet<(usize, usize)> = initiation_states
            .iter()
            .map(|&s| self.cell_of_state[s])
            .collect();
        let mut out = String::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let ch = if self.walls.contains(&(row, col)) {
                    '#'
                } else if (row, col) == self.goal_cell {
                    'G'
                } else if marked.contains(&(row, col)) {
                    'B'
                } else {
                    '.'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

const MOVES: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, 1), (0, -1)]; // N, S, E, W

/// Build the tabular MDP for a grid spec.
///
/// One state per non-wall cell in row-major order, goal last. Entering the
/// goal cell yields `goal_reward`; every other transition yields
/// `move_reward`. The goal state is absorbing with zero reward.
pub fn build_grid_mdp(spec: &GridSpec) -> Result<(Mdp, GridLayout)> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::InvalidMdp("grid must be nonempty".into()));
    }
    if spec.goal.0 >= spec.height || spec.goal.1 >= spec.width {
        return Err(Error::InvalidMdp("goal cell out of range".into()));
    }
    if spec.walls.contains(&spec.goal) {
        return Err(Error::InvalidMdp("goal cell is a wall".into()));
    }
    if !(0.0..1.0).contains(&spec.slip_probability) {
        return Err(Error::InvalidMdp(format!(
            "slip probability must lie in [0, 1), got {}",
            spec.slip_probability
        )));
    }
    for &(r, c) in &spec.walls {
        if r >= spec.height || c >= spec.width {
            return Err(Error::InvalidMdp(format!("wall ({r}, {c}) out of range")));
        }
    }

    // Row-major floor cells, goal moved to the last index.
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for row in 0..spec.height {
        for col in 0..spec.width {
            if !spec.walls.contains(&(row, col)) && (row, col) != spec.goal {
                cells.push((row, col));
            }
        }
    }
    cells.push(spec.goal);
    let n = cells.len();
    let goal_state = n - 1;
    let mut state_of_cell = vec![None; spec.width * spec.height];
    for (i, &(r, c)) in cells.iter().enumerate() {
        state_of_cell[r * spec.width + c] = Some(i);
    }
    let layout = GridLayout {
        width: spec.width,
        height: spec.height,
        walls: spec.walls.clone(),
        goal_cell: spec.goal,
        cell_of_state: cells.clone(),
        state_of_cell,
    };

    // Every floor cell must be connected to the goal through floor cells.
    let reachable = floor_bfs(&layout, spec.goal);
    for &(r, c) in &cells {
        if !reachable[r * spec.width + c] {
            return Err(Error::DisconnectedCell { row: r, col: c });
        }
    }

    let p = spec.slip_probability;
    let mut transitions = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    for (i, &(r, c)) in cells.iter().enumerate() {
        if i == goal_state {
            transitions.push(vec![vec![(goal_state, 1.0)]; 4]);
            rewards.push(vec![0.0; 4]);
            continue;
        }
        let mut acts = Vec::with_capacity(4);
        let mut rews = Vec::with_capacity(4);
        for &(dr, dc) in &MOVES {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            let target = if nr < 0
                || nc < 0
                || nr as usize >= spec.height
                || nc as usize >= spec.width
                || spec.walls.contains(&(nr as usize, nc as usize))
            {
                i // bump: stay in place
            } else {
                layout.state_at(nr as usize, nc as usize).unwrap()
            };
            let mut dist: Vec<(usize, f64)> = Vec::new();
            if target == i {
                dist.push((i, 1.0));
            } else if p == 0.0 {
                dist.push((target, 1.0));
            } else {
                dist.push((target, 1.0 - p));
                dist.push((i, p));
            }
            let reward: f64 = dist
                .iter()
                .map(|&(next, prob)| {
                    let r_step = if next == goal_state {
                        spec.goal_reward
                    } else {
                        spec.move_reward
                    };
                    prob * r_step
                })
                .sum();
            acts.push(dist);
            rews.push(reward);
        }
        transitions.push(acts);
        rewards.push(rews);
    }
    let mdp = Mdp::new(transitions, rewards, 0.95, goal_state)?;
    Ok((mdp, layout))
}

fn floor_bfs(layout: &GridLayout, start: (usize, usize)) -> Vec<bool> {
    let mut seen = vec![false; layout.width * layout.height];
    seen[start.0 * layout.width + start.1] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some((r, c)) = queue.pop_front() {
        for &(dr, dc) in &MOVES {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr < 0 || nc < 0 || nr as usize >= layout.height || nc as usize >= layout.width {
                continue;
            }
            let (nr, nc) = (nr as usize, nc as usize);
            if layout.walls.contains(&(nr, nc)) || seen[nr * layout.width + nc] {
                continue;
            }
            seen[nr * layout.width + nc] = true;
            queue.push_back((nr, nc));
        }
    }
    seen
}

/// Parse the text map format: `#` wall, `.` floor, `G` goal.
pub fn parse_map(text: &str) -> Result<GridSpec> {
    let mut walls = BTreeSet::new();
    let mut goal = None;
    let mut width = None;
    let mut height = 0;
    for (row, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        match width {
            None => width = Some(line.chars().count()),
            Some(w) if line.chars().count() != w => {
                return Err(Error::MapFormat {
                    line: row + 1,
                    column: line.chars().count() + 1,
                    message: format!("expected {} columns", w),
                });
            }
            _ => {}
        }
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '#' => {
                    walls.insert((row, col));
                }
                '.' => {}
                'G' => {
                    if goal.is_some() {
                        return Err(Error::MapFormat {
                            line: row + 1,
                            column: col + 1,
                            message: "more than one goal cell".into(),
                        });
                    }
                    goal = Some((row, col));
                }
                other => {
                    return Err(Error::MapFormat {
                        line: row + 1,
                        column: col + 1,
                        message: format!("unexpected character `{other}`"),
                    });
                }
            }
        }
        height = row + 1;
    }
    let width = width.ok_or(Error::MapFormat {
        line: 1,
        column: 1,
        message: "empty map".into(),
    })?;
    let goal = goal.ok_or(Error::MapFormat {
        line: height,
        column: 1,
        message: "map has no goal cell".into(),
    })?;
    Ok(GridSpec {
        width,
        height,
        walls,
        goal,
        move_reward: 0.0,
        goal_reward: 1.0,
        slip_probability: 0.0,
    })
}
