export class ExtractError extends Error {
  constructor(
    public readonly kind: "ModelUnavailable" | "DatasetUnreadable" | "DeviceUnavailable",
    message: string
  ) {
    super(`${kind}: ${message}`);
    this.name = kind;
  }
}
