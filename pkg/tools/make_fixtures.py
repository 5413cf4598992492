"""Regenerate the synthetic fixtures shipped in src/socialsense/fixtures."""
from pathlib import Path

import numpy as np

from socialsense import incest, network, revealed_prefs as rp, timeseries

OUT = Path(__file__).resolve().parents[1] / "src" / "socialsense" / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    # utility-maximising consumer: passes GARP by construction
    rp.write_dataset(rp.cobb_douglas_dataset(20, 2, np.random.default_rng(0), alpha=[0.4, 0.6]), OUT / "cobb_douglas.csv")
    # three-observation preference cycle
    p = np.array([[1.0, 0.5, 4.0], [4.0, 1.0, 0.5], [0.5, 4.0, 1.0]])
    rp.write_dataset(rp.ConsumerDataset(p, 2.0 * np.eye(3)), OUT / "garp_cycle.csv")
    game = rp.LogPotentialGame(np.array([[1.0, 2.0], [2.0, 1.0]]), 0.5)
    rp.write_dataset(rp.potential_game_dataset(game, 15, np.random.default_rng(1)), OUT / "potential_game.csv")

    network.write_edge_list(network.generate_graph(network.PowerLaw(100, 2.5, 17, min_degree=2), 0), OUT / "powerlaw_100.txt")
    g = network.generate_graph(network.Configuration(1000, (0, 0, 0.25, 0.25, 0.25, 0.25)), 0)
    network.write_edge_list(g, OUT / "social_1000.txt")
    values = np.random.default_rng(2).choice(3, size=g.n_nodes, p=[0.5, 0.3, 0.2])
    with open(OUT / "sentiment_1000.csv", "w") as fh:
        fh.write("node,value\n")
        fh.writelines(f"{n},{v}\n" for n, v in enumerate(values))

    incest.save_dag(incest.seven_node_example(), OUT / "seven_node.json")
    incest.save_dag(incest.double_path_example(), OUT / "double_path.json")

    # input series with an 18-step delayed response, as in the tweet/flu preset
    rng = np.random.default_rng(3)
    rho = 50 + 30 * np.sin(np.arange(430) * 2 * np.pi / 120) + rng.normal(0, 5, 430)
    model = timeseries.ArxModel(0, 2, 18, np.zeros(0), np.array([0.6, 0.3]), 10.0)
    tau = timeseries.simulate_arx(model, rho, noise_std=2.0, rng=rng)
    timeseries.write_series(OUT / "flu_series.csv", tau, rho)


if __name__ == "__main__":
    main()
