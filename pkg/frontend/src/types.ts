/** Wire types for the glasspass HTTP service. */

export type Role = "Administrator" | "Citizen" | "Actor" | "Arbiter";

export interface WhoAmI {
  account_id: string;
  role: Role;
  display_name: string;
}

export interface Purpose {
  actor: string;
  operation: string;
  purpose: string;
  index: number;
}

export interface PurposesResponse {
  purposes: Purpose[];
  /** Present for citizens only: purpose index (stringified) -> latest vote. */
  consent?: Record<string, boolean>;
}

export interface VoteAck {
  count: number;
  gas_used: number;
  height: number;
}

export interface PublishAck {
  count: number;
  gas_used: number;
  height: number;
}

export interface PassportList {
  anon_cids: string[];
}

export interface AccessResult {
  anon_cid: string;
  subject: string;
  passport: Record<string, unknown>;
  chi: string;
}

export interface ErasureAck {
  anon_cid: string;
  erased_at: number;
  already?: boolean;
  [key: string]: unknown;
}

export interface ErasureViolation {
  citizen: string;
  anon_cid: string;
  kind: "missing-confirmation" | "deadline-exceeded";
  request_time: number;
  deadline: number;
  [key: string]: unknown;
}

export interface VerificationReport {
  id: number;
  generated_at: number;
  citizens: string[];
  violators: string[];
  reasons: Record<string, string[]>;
  erasure_violations: ErasureViolation[];
  pending_erasures: Array<Record<string, unknown>>;
  [key: string]: unknown;
}

export interface Transaction {
  sender: string;
  contract: string;
  function: string;
  args: Record<string, unknown>;
  gas_price: number;
  gas_used: number;
  timestamp: number;
}

export interface Block {
  height: number;
  prev_hash: string;
  tx_list: Transaction[];
  block_hash: string;
}

export interface Principal {
  account_id: string;
  role: Role;
  display_name: string;
}
