"""Exercise the HTTP service in-process, no sockets needed.

Builds the ASGI app around a freshly trained model and speaks to it through
an in-memory transport, printing each request and response. The same JSON
flows over the wire when the service runs under `nestembed serve`.
"""

import asyncio
import json

import httpx

from nestembed import (
    TrainConfig,
    create_app,
    init_model,
    make_synthetic_triplets,
    train,
)


async def main() -> None:
    triplets = make_synthetic_triplets(4, 120, seed=42)
    config = TrainConfig(batch_size=32, epochs=2, ladder=(64, 32, 16), seed=7)
    model, _ = train(init_model(config), triplets, config)

    app = create_app({"demo": model})
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://service") as client:
        listing = (await client.get("/v1/models")).json()
        print("GET /v1/models")
        print(f"  {json.dumps(listing)}")
        print()

        sentence = triplets[0].anchor
        body = {
            "model_id": "demo",
            "dim": 32,
            "mode": "pair",
            "sentence_a": sentence,
            "sentences_b": [sentence],
        }
        response = (await client.post("/v1/similarity", json=body)).json()
        print("POST /v1/similarity (identical pair, dim 32)")
        print(f"  scores: {response['scores']}")
        print()

        body = {
            "model_id": "demo",
            "dim": 64,
            "mode": "one_vs_three",
            "sentence_a": triplets[0].anchor,
            "sentences_b": [triplets[0].positive, triplets[0].negative,
                            triplets[50].negative],
        }
        response = (await client.post("/v1/similarity", json=body)).json()
        print("POST /v1/similarity (one_vs_three, dim 64)")
        for i, score in enumerate(response["scores"], start=1):
            print(f"  candidate {i}: {score}")
        print()

        bad = dict(body, dim=48)
        r = await client.post("/v1/similarity", json=bad)
        print("POST /v1/similarity with dim 48 (not on the ladder)")
        print(f"  HTTP {r.status_code}: {r.json()['error']['message']}")


if __name__ == "__main__":
    asyncio.run(main())
