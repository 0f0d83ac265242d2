import { describe, expect, it } from "vitest";

import { ConsentPage, consentStateOf } from "../src/pages/consent.js";
import type { PurposesResponse, VoteAck } from "../src/types.js";
import { click, domRoot, textOf } from "./helpers.js";

const PURPOSES = [
  { actor: "actor-1", operation: "read", purpose: "medical care", index: 0 },
  { actor: "actor-1", operation: "update", purpose: "medical care", index: 1 },
  { actor: "actor-2", operation: "view", purpose: "travel checks", index: 2 },
];

/** Behaves like the service: votes change what the next GET returns. */
class FakeConsentApi {
  votesPosted: Array<[number, boolean]> = [];
  fetches = 0;
  consent: Record<string, boolean> = {};

  async purposes(): Promise<PurposesResponse> {
    this.fetches += 1;
    return { purposes: PURPOSES, consent: { ...this.consent } };
  }

  async vote(votes: Array<[number, boolean]>): Promise<VoteAck> {
    this.votesPosted.push(...votes);
    for (const [index, choice] of votes) {
      this.consent[String(index)] = choice;
    }
    return { count: votes.length, gas_used: 61600, height: 7 };
  }
}

describe("consentStateOf", () => {
  it("maps votes to display states", () => {
    expect(consentStateOf(undefined, 0)).toBe("no vote");
    expect(consentStateOf({ "0": true }, 0)).toBe("consented");
    expect(consentStateOf({ "0": false }, 0)).toBe("declined");
    expect(consentStateOf({ "1": true }, 0)).toBe("no vote");
  });
});

describe("ConsentPage", () => {
  it("renders one row per purpose with the server's vote state", async () => {
    const api = new FakeConsentApi();
    api.consent = { "1": false };
    const root = domRoot();
    await new ConsentPage(root, api).load();

    expect(root.querySelectorAll("tbody tr")).toHaveLength(3);
    expect(textOf(root, '[data-testid="state-0"]')).toBe("no vote");
    expect(textOf(root, '[data-testid="state-1"]')).toBe("declined");
    expect(textOf(root, '[data-testid="purpose-2"]')).toContain("travel checks");
  });

  it("posts the vote and re-renders from the next server response", async () => {
    const api = new FakeConsentApi();
    const root = domRoot();
    const page = new ConsentPage(root, api);
    await page.load();
    expect(api.fetches).toBe(1);

    click(root, 'button[data-action="consent"][data-index="1"]');
    await page.pending;

    expect(api.votesPosted).toEqual([[1, true]]);
    expect(api.fetches).toBe(2); // state came from a fresh GET
    expect(textOf(root, '[data-testid="state-1"]')).toBe("consented");
    expect(textOf(root, '[data-testid="state-0"]')).toBe("no vote");

    click(root, 'button[data-action="decline"][data-index="1"]');
    await page.pending;
    expect(api.votesPosted).toEqual([
      [1, true],
      [1, false],
    ]);
    expect(textOf(root, '[data-testid="state-1"]')).toBe("declined");
  });

  it("shows the server state even when a vote is not applied", async () => {
    const api = new FakeConsentApi();
    api.vote = async (votes) => {
      api.votesPosted.push(...votes);
      return { count: votes.length, gas_used: 0, height: 0 };
    }; // server accepted nothing: consent map untouched
    const root = domRoot();
    const page = new ConsentPage(root, api);
    await page.load();

    click(root, 'button[data-action="consent"][data-index="0"]');
    await page.pending;
    expect(api.votesPosted).toEqual([[0, true]]);
    expect(textOf(root, '[data-testid="state-0"]')).toBe("no vote");
  });

  it("renders the empty state without purposes", async () => {
    const api = new FakeConsentApi();
    (api as unknown as { purposes: () => Promise<PurposesResponse> }).purposes =
      async () => ({ purposes: [] });
    const root = domRoot();
    await new ConsentPage(root, api).load();
    expect(textOf(root, ".empty")).toContain("No purposes");
  });
});
