static int start_device(struct device *dev)
{
    int rc;
    if (dev == NULL) {
        return -1;
    }
    dev->state = 1;
    rc = notify_watchers(dev);
    return rc;
}
