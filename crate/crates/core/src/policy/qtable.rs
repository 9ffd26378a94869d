use rand::Rng;

/// Dense tabular action values, one row per state.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(states: usize, actions: usize) -> Self {
        Self::filled(states, actions, 0.0)
    }

    pub fn filled(states: usize, actions: usize, value: f64) -> Self {
        assert!(actions > 0, "a Q-table needs at least one action");
        Self {
            actions,
            values: vec![value; states * actions],
        }
    }

    pub fn states(&self) -> usize {
        self.values.len() / self.actions
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn row_mut(&mut self, state: usize) -> &mut [f64] {
        &mut self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.actions + action] = value;
    }

    pub fn max(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn best(&self, state: usize) -> usize {
        argmax(self.row(state))
    }

    /// One tabular Q-learning step. `next` is `None` for a terminal transition.
    pub fn update(&mut self, state: usize, action: usize, reward: f64, next: Option<usize>, alpha: f64, gamma: f64) -> f64 {
        let bootstrap = next.map_or(0.0, |s| gamma * self.max(s));
        let q = self.get(state, action);
        let updated = q + alpha * (reward + bootstrap - q);
        self.set(state, action, updated);
        updated
    }

    pub fn epsilon_greedy<R: Rng + ?Sized>(&self, state: usize, epsilon: f64, rng: &mut R) -> usize {
        epsilon_greedy(self.row(state), epsilon, rng)
    }

    pub fn epsilon_greedy_spread<R: Rng + ?Sized>(&self, state: usize, epsilon: f64, rng: &mut R) -> usize {
        epsilon_greedy_spread(self.row(state), epsilon, rng)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// With probability `epsilon` a uniform action, otherwise the greedy one.
/// The exploration coin is always drawn so the stream stays aligned.
pub fn epsilon_greedy<R: Rng + ?Sized>(row: &[f64], epsilon: f64, rng: &mut R) -> usize {
    let coin: f64 = rng.random();
    if coin < epsilon {
        rng.random_range(0..row.len())
    } else {
        argmax(row)
    }
}

/// As [`epsilon_greedy`], but greedy ties are broken uniformly so learners
/// with identical tables do not all pick the same action.
pub fn epsilon_greedy_spread<R: Rng + ?Sized>(row: &[f64], epsilon: f64, rng: &mut R) -> usize {
    let coin: f64 = rng.random();
    if coin < epsilon {
        return rng.random_range(0..row.len());
    }
    let best = row[argmax(row)];
    let ties = row.iter().filter(|&&v| v == best).count();
    if ties == 1 {
        return argmax(row);
    }
    let pick = rng.random_range(0..ties);
    row.iter()
        .enumerate()
        .filter(|&(_, &v)| v == best)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("pick < ties")
}
