"""Regenerate src/edgepush/data/clustered_1k.txt (needs networkx, not a runtime dependency)."""
from pathlib import Path

import networkx as nx

OUT = Path(__file__).resolve().parents[1] / "src" / "edgepush" / "data" / "clustered_1k.txt"


def main() -> None:
    g = nx.powerlaw_cluster_graph(1000, 5, 0.5, seed=7)
    with OUT.open("w") as f:
        f.write("# powerlaw_cluster_graph(n=1000, m=5, p=0.5, seed=7), unweighted\n")
        for u, v in sorted((min(e), max(e)) for e in g.edges()):
            f.write(f"{u} {v}\n")


if __name__ == "__main__":
    main()
