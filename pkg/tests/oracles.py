"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's own shortest-path code paths: chains
are enumerated by min-plus matrix powers, Cayley graphs are searched by a
hand-rolled per-source BFS, and weighted graphs by Bellman-Ford relaxation.
"""

from fractions import Fraction

from coarsekit.groups import compose, invert
from coarsekit.metrics import bk_norm


def chain_enumeration_oracle(filtration, domain, max_hops=4):
    """Best chain cost between all pairs using chains of at most max_hops hops.

    Equivalent to enumerating every chain x_0, ..., x_k with k <= max_hops
    through the domain and summing the norms of consecutive differences.
    """
    points = sorted(domain)
    n = len(points)
    W = [[bk_norm(compose(invert(points[i]), points[j]), filtration)
          for j in range(n)] for i in range(n)]
    best = [row[:] for row in W]
    power = [row[:] for row in W]
    for _ in range(max_hops - 1):
        nxt = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                val = None
                for k in range(n):
                    cand = power[i][k] + W[k][j]
                    if val is None or cand < val:
                        val = cand
                nxt[i][j] = val
        power = nxt
        for i in range(n):
            for j in range(n):
                if power[i][j] < best[i][j]:
                    best[i][j] = power[i][j]
    return points, best


def literal_chain_oracle(filtration, domain, max_hops=3):
    """Tiny-domain cross-check: spell out every chain with explicit loops."""
    import itertools

    points = sorted(domain)
    norm = {}
    for g in points:
        for h in points:
            norm[(g, h)] = bk_norm(compose(invert(g), h), filtration)
    best = {}
    for g in points:
        for h in points:
            val = norm[(g, h)]
            for hops in range(2, max_hops + 1):
                for mids in itertools.product(points, repeat=hops - 1):
                    chain = (g,) + mids + (h,)
                    cost = sum(norm[(chain[i], chain[i + 1])] for i in range(hops))
                    if cost < val:
                        val = cost
            best[(g, h)] = val
    return best


def cayley_bfs_oracle(domain, genset):
    """All-pairs distances on the explicit Cayley graph over the domain.

    Vertices are the domain elements; g is adjacent to g*s for each generator.
    Neighbors leading outside the domain are dropped, matching the word
    metric's restriction that both endpoints lie in the domain (paths may
    still leave it, so callers should pass a product-closed domain).
    """
    points = sorted(domain)
    member = set(points)
    adjacency = {g: [compose(g, s) for s in genset if not s.is_identity()
                     and compose(g, s) in member] for g in points}
    table = {}
    for source in points:
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adjacency[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        for target in points:
            table[(source, target)] = dist.get(target)
    return table


def bellman_ford_oracle(nodes, edges):
    """All-pairs shortest paths by repeated edge relaxation.

    edges is an iterable of (u, v, weight) with symmetric intent; both
    directions are relaxed.  Returns dict[(u, v)] -> Fraction | None.
    """
    nodes = list(nodes)
    table = {}
    for source in nodes:
        dist = {node: None for node in nodes}
        dist[source] = Fraction(0)
        for _ in range(len(nodes)):
            changed = False
            for u, v, w in edges:
                for a, b in ((u, v), (v, u)):
                    da = dist[a]
                    if da is None:
                        continue
                    cand = da + w
                    if dist[b] is None or cand < dist[b]:
                        dist[b] = cand
                        changed = True
            if not changed:
                break
        for node in nodes:
            table[(source, node)] = dist[node]
    return table
