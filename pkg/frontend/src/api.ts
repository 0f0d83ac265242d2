/** JSON client for the service. One method per route; bearer auth. */

import type {
  AccessResult,
  Block,
  ErasureAck,
  PassportList,
  Principal,
  PublishAck,
  Purpose,
  PurposesResponse,
  VerificationReport,
  VoteAck,
  WhoAmI,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly body: Record<string, unknown> = {},
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function defaultFetch(): FetchLike {
  return globalThis.fetch.bind(globalThis);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike = defaultFetch(),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    payload?: unknown,
    extraOk: number[] = [],
  ): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        authorization: `Bearer ${this.token}`,
        ...(payload === undefined ? {} : { "content-type": "application/json" }),
      },
      ...(payload === undefined ? {} : { body: JSON.stringify(payload) }),
    };
    const response = await this.fetchImpl(this.baseUrl + path, init);
    let body: Record<string, unknown> = {};
    try {
      body = (await response.json()) as Record<string, unknown>;
    } catch {
      body = {};
    }
    if (!response.ok && !extraOk.includes(response.status)) {
      const detail =
        typeof body.detail === "string" ? body.detail : JSON.stringify(body);
      throw new ApiError(response.status, detail, body);
    }
    return body as T;
  }

  whoami(): Promise<WhoAmI> {
    return this.request("GET", "/whoami");
  }

  registerPrincipal(accountId: string, role: string, displayName = ""): Promise<Principal> {
    return this.request("POST", "/principals", {
      account_id: accountId,
      role,
      display_name: displayName,
    });
  }

  principals(): Promise<{ principals: Principal[] }> {
    return this.request("GET", "/principals");
  }

  publishPurposes(records: Omit<Purpose, "index">[]): Promise<PublishAck> {
    return this.request("POST", "/purposes", { records });
  }

  purposes(): Promise<PurposesResponse> {
    return this.request("GET", "/purposes");
  }

  vote(votes: Array<[number, boolean]>): Promise<VoteAck> {
    return this.request("POST", "/votes", { votes });
  }

  createPassport(record: Record<string, unknown>, citizen: string): Promise<{ anon_cid: string }> {
    return this.request("POST", "/passports", { record, citizen });
  }

  passports(): Promise<PassportList> {
    return this.request("GET", "/passports");
  }

  access(anonCid: string, operations: string[]): Promise<AccessResult> {
    return this.request("POST", "/access-requests", {
      anon_cid: anonCid,
      operations,
    });
  }

  /** 410 means "already erased": surfaced as a normal acknowledgement. */
  erase(anonCid: string): Promise<ErasureAck> {
    return this.request("POST", "/erasure-requests", { anon_cid: anonCid }, [410]);
  }

  verify(citizen?: string): Promise<VerificationReport> {
    return this.request("POST", "/verify", { citizen: citizen ?? null });
  }

  eraseVerify(): Promise<{ violations: unknown[]; pending: unknown[] }> {
    return this.request("POST", "/erase-verify");
  }

  latestReport(): Promise<VerificationReport> {
    return this.request("GET", "/reports/latest");
  }

  blocks(): Promise<{ blocks: Block[] }> {
    return this.request("GET", "/ledger/blocks");
  }
}
